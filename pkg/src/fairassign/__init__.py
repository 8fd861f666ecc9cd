"""Random assignment of items to unit-demand agents under an uncertain priority."""

from .audit import (
    AuditReport,
    baseline_allocation,
    check_1lef,
    check_lef_lottery,
    check_oe,
    check_oe_bruteforce,
    check_prop,
    check_sef,
    count_envy_pairs,
    sd_dominates,
)
from .eating import (
    build_sd_graph,
    condense,
    cycle_elimination,
    probabilistic_serial,
    probabilistic_serial_assignment,
    unit_time_eating,
)
from .fixtures import load_fixture
from .lefsolve import enumerate_support_assignments, lef_feasible
from .lottery import bvn_decompose, rsd, serial_dictatorship
from .model import (
    Instance,
    InvalidInput,
    Lottery,
    RandomAssignment,
    RandomPriority,
    assignment_from_lottery,
    load_instance,
    rank_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "baseline_allocation",
    "check_1lef",
    "check_lef_lottery",
    "check_oe",
    "check_oe_bruteforce",
    "check_prop",
    "check_sef",
    "count_envy_pairs",
    "sd_dominates",
    "build_sd_graph",
    "condense",
    "cycle_elimination",
    "probabilistic_serial",
    "probabilistic_serial_assignment",
    "unit_time_eating",
    "load_fixture",
    "enumerate_support_assignments",
    "lef_feasible",
    "bvn_decompose",
    "rsd",
    "serial_dictatorship",
    "Instance",
    "InvalidInput",
    "Lottery",
    "RandomAssignment",
    "RandomPriority",
    "assignment_from_lottery",
    "load_instance",
    "rank_distribution",
]
