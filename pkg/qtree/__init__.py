from .errors import (
    InvalidParameterError,
    QTreeError,
    SizeGuardError,
    StateValidationError,
    VerificationError,
)
from .fidelity_engine import (
    FidelityMethod,
    FidelityReport,
    WeightedNetwork,
    epsilon_of,
    favg_closed,
    favg_closed_nodes,
    favg_from_census,
    favg_weighted,
    path_fidelities,
    uniform_network,
)
from .monte_carlo import TableRow, TrialBatch, expectation_check, reference_draws, run_trials, table_comparison
from .network_analysis import (
    AsymptoticProfile,
    MEPlacement,
    PlacementStrategy,
    ThresholdResult,
    advantage_horizon,
    advantage_threshold,
    asymptotic_profile,
    epsilon_order,
    me_placement,
    me_threshold,
    threshold_table,
)
from .path_census import (
    CensusMethod,
    PathCensus,
    average_path_length,
    census_closed_form,
    census_enumerate,
    usbt_branch,
)
from .quantum_core import (
    CorrelationMatrix,
    DensityMatrix,
    bell_state,
    chain_fidelity,
    correlation_matrix,
    entanglement_swap,
    iterated_swap,
    kron,
    link_threshold,
    partial_trace,
    teleportation_fidelity,
    werner_state,
)
from .topology import TreeKind, TreeTopology, build_tree, depth_from_nodes, node_count

__version__ = "0.1.0"
