"""Toolkit for bipartite binary-outcome Bell inequalities in Collins-Gisin form.

Local bounds and facet verification by exact arithmetic, two-qubit quantum
bounds by multi-restart see-saw, white-noise and detection-efficiency
thresholds, relabeling symmetries and canonical forms, plus a batch CLI.
"""

from .analysis import (
    AnalysisReport,
    CanonGroup,
    CompareResult,
    analyze_table,
    analyze_tables,
    compare_reports,
    group_equivalent,
    load_report_csv,
    reference_csv_path,
    to_csv,
    to_json,
    to_markdown,
)
from .fixtures import all_fixtures, chsh, i3322, i3422_1, i3422_2, i3422_3
from .localpoly import (
    DeterministicStrategy,
    FacetReport,
    Lifting,
    detect_lifting,
    enumerate_strategies,
    exact_rank,
    facet_check,
    local_bound,
    white_noise_value,
)
from .model import (
    Behavior,
    CgTable,
    ParseError,
    Scenario,
    ScenarioMismatchError,
    evaluate,
    parse_file,
    serialize_file,
)
from .quantum import (
    QuantumBoundResult,
    QuantumStrategy,
    born_marginal_a,
    born_marginal_b,
    born_probability,
    quantum_bound,
    quantum_value,
    seesaw_step,
    strategy_behavior,
)
from .robustness import (
    NOCLICK_STRATEGIES,
    DetectionAnalysis,
    InconsistencyError,
    NoClickAssignment,
    NoClickStrategy,
    assignment_values,
    detection_threshold,
    noclick_values,
    noise_resistance,
)
from .symmetry import (
    CorrelatorForm,
    Relabeling,
    apply_relabeling,
    canonical_form,
    correlation_form,
    random_relabeling,
    relabelings,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "Behavior",
    "CanonGroup",
    "CgTable",
    "CompareResult",
    "CorrelatorForm",
    "DetectionAnalysis",
    "DeterministicStrategy",
    "FacetReport",
    "InconsistencyError",
    "Lifting",
    "NOCLICK_STRATEGIES",
    "NoClickAssignment",
    "NoClickStrategy",
    "ParseError",
    "QuantumBoundResult",
    "QuantumStrategy",
    "Relabeling",
    "Scenario",
    "ScenarioMismatchError",
    "all_fixtures",
    "analyze_table",
    "analyze_tables",
    "apply_relabeling",
    "assignment_values",
    "born_marginal_a",
    "born_marginal_b",
    "born_probability",
    "canonical_form",
    "chsh",
    "compare_reports",
    "correlation_form",
    "detect_lifting",
    "detection_threshold",
    "enumerate_strategies",
    "evaluate",
    "exact_rank",
    "facet_check",
    "group_equivalent",
    "i3322",
    "i3422_1",
    "i3422_2",
    "i3422_3",
    "load_report_csv",
    "local_bound",
    "noclick_values",
    "noise_resistance",
    "parse_file",
    "quantum_bound",
    "quantum_value",
    "random_relabeling",
    "reference_csv_path",
    "relabelings",
    "seesaw_step",
    "serialize_file",
    "strategy_behavior",
    "to_csv",
    "to_json",
    "to_markdown",
    "white_noise_value",
]
