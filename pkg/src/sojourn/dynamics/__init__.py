from .brackets import fd_gradient, is_critical, nabla_H, poisson_bracket
from .checks import (
    T_f_observable,
    check_assumption,
    check_flow_group,
    check_gradient_law,
    check_time_operator,
    critical_inclusion,
    crosscheck_nabla,
    energy_drift,
    orthogonality_defect,
)
from .system import FlowKind, HamiltonianSystem, Observable, PhasePoint

__all__ = [
    "FlowKind",
    "HamiltonianSystem",
    "Observable",
    "PhasePoint",
    "fd_gradient",
    "is_critical",
    "nabla_H",
    "poisson_bracket",
    "T_f_observable",
    "check_assumption",
    "check_flow_group",
    "check_gradient_law",
    "check_time_operator",
    "critical_inclusion",
    "crosscheck_nabla",
    "energy_drift",
    "orthogonality_defect",
]
