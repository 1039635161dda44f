from pathlib import Path
from typing import Any, Dict, Iterable, List

import pandas as pd

FLOAT_FORMAT = "%.17g"

RESULT_COLUMNS = ["point_id", "r", "value", "T_f", "abs_error", "t_star", "mode", "acceptance", "tail"]


class Stats:
    """Per-run tables written under ``reports/``: summary, errors and run metrics."""

    def __init__(self):
        self.rows: List[Dict[str, Any]] = []
        self.errors: List[Dict[str, Any]] = []
        self.run_metrics: List[Dict[str, Any]] = []

    def add_summary(self, row: Dict[str, Any]):
        self.rows.append(row)

    def add_error(self, system: str, point_id: str, stage: str, err: str):
        self.errors.append({"system": system, "point_id": point_id, "stage": stage, "error": err})

    def add_metric(self, k: str, v):
        self.run_metrics.append({"key": k, "value": v})

    def write(self, reports_dir: Path):
        reports_dir.mkdir(parents=True, exist_ok=True)
        if self.rows:
            df = pd.DataFrame(self.rows).sort_values("point_id", kind="stable")
            df.to_csv(reports_dir / "summary.csv", index=False, float_format=FLOAT_FORMAT)
        if self.errors:
            pd.DataFrame(self.errors).to_csv(reports_dir / "errors.csv", index=False)
        if self.run_metrics:
            pd.DataFrame(self.run_metrics).to_csv(reports_dir / "run_metrics.csv", index=False)


def write_results(rows: Iterable[Dict[str, Any]], path: Path) -> pd.DataFrame:
    """Write the per-(point, r) table sorted by (point_id, r) with 17 significant digits."""
    df = pd.DataFrame(list(rows), columns=RESULT_COLUMNS)
    df = df.sort_values(["point_id", "r"], kind="stable").reset_index(drop=True)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return df


def read_results(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"point_id": str, "mode": str}, float_precision="round_trip")
