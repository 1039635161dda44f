import json
from pathlib import Path

from pydantic import BaseModel


class JSONLWriter:
    """Appends one JSON document per model; ``fresh=True`` starts the file over."""

    def __init__(self, path: Path, fresh: bool = True):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if fresh:
            self.path.write_text("", encoding="utf-8")

    def append(self, rec: BaseModel):
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(rec.model_dump(mode="json"), ensure_ascii=False, sort_keys=True) + "\n")
