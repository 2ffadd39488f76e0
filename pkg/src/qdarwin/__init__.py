"""Simulation and estimation toolkit for system-environment graph states:
construct star/diamond resources, quantify information redundancy through
system-fragment mutual information, and reproduce the analysis from
finite-statistics Pauli-correlator measurements."""

__version__ = "0.1.0"

from .qcore import (
    DensityMatrix,
    Gate,
    PauliString,
    StateVector,
    all_pauli_strings,
    apply_circuit,
    apply_gate,
    fidelity,
    hermitian_eigenvalues,
    partial_trace,
    pauli_expectation,
    project_to_physical,
    reduced_density,
    states_equal_up_to_phase,
    subsystem_entropy,
    tensor_product,
    von_neumann_entropy,
)
from .graphstate import (
    EquivalenceReport,
    GraphSpec,
    build_graph_state,
    check_local_equivalence,
    diamond_canonical_check,
    diamond_spec,
    evolve_ising,
    ghz_state,
    named_state,
    star_ghz_check,
    star_spec,
)
from .darwinism import (
    Fragment,
    MICurve,
    MIPoint,
    classify_curve,
    enumerate_fragments,
    mi_curve,
    mutual_information,
)
from .estimator import (
    CorrelatorTable,
    MeasurementPlan,
    StarParameters,
    correlator_table,
    diamond_mutual_information,
    plan_measurements,
    reconstruct_density,
    star_mutual_information,
    star_parameters,
)
from .measurement import (
    OutcomeCounts,
    RunConfig,
    counts_from_json,
    counts_to_json,
    estimate_correlators,
    estimate_mi_curve,
    mi_curve_from_counts,
    sample_setting,
)

__all__ = [
    "DensityMatrix",
    "Gate",
    "PauliString",
    "StateVector",
    "all_pauli_strings",
    "apply_circuit",
    "apply_gate",
    "fidelity",
    "hermitian_eigenvalues",
    "partial_trace",
    "pauli_expectation",
    "project_to_physical",
    "reduced_density",
    "states_equal_up_to_phase",
    "subsystem_entropy",
    "tensor_product",
    "von_neumann_entropy",
    "EquivalenceReport",
    "GraphSpec",
    "build_graph_state",
    "check_local_equivalence",
    "diamond_canonical_check",
    "diamond_spec",
    "evolve_ising",
    "ghz_state",
    "named_state",
    "star_ghz_check",
    "star_spec",
    "Fragment",
    "MICurve",
    "MIPoint",
    "classify_curve",
    "enumerate_fragments",
    "mi_curve",
    "mutual_information",
    "CorrelatorTable",
    "MeasurementPlan",
    "StarParameters",
    "correlator_table",
    "diamond_mutual_information",
    "plan_measurements",
    "reconstruct_density",
    "star_mutual_information",
    "star_parameters",
    "OutcomeCounts",
    "RunConfig",
    "counts_from_json",
    "counts_to_json",
    "estimate_correlators",
    "estimate_mi_curve",
    "mi_curve_from_counts",
    "sample_setting",
]
