"""editwalk: edit-driven Markov chains on subgraphs of a host graph.

Simulation of per-edge and compound-edit update processes, plus an exact
desk-scale spectral engine: transition matrices, stationary laws,
closed-form eigensystems, mixing bounds, and hitting/commute times.
"""

__version__ = "0.1.0"

from .edits import (
    Edit,
    Sign,
    apply,
    chamber_of,
    compose,
    format_edit,
    leq,
    parse_edit,
    prec,
    simple_edit,
    state_of,
    supp,
)
from .hostgraph import (
    EdgeSet,
    HostGraph,
    complete_bipartite,
    complete_graph,
    from_edge_list,
    host_from_json,
    host_to_json,
    is_acyclic,
    neighborhood_edges,
)
from .lattice import (
    SpectrumEntry,
    SpectrumReport,
    SupportLattice,
    closure,
    eigenvalue,
    mobius,
    multiplicities,
    representatives_for,
)
from .process import (
    Trajectory,
    WeightedEdits,
    block_probabilities,
    chung_lu_probabilities,
    empirical_distribution,
    erdos_renyi_probabilities,
    intersection_host,
    intersection_stationary,
    intersection_weights,
    make_rng,
    moran_weights,
    simple_edit_weights,
    simulate,
    step,
)
from .spectral import (
    EigenSystem,
    TransitionMatrix,
    brown_tv_bound,
    build_chain,
    commute_terms,
    commute_time,
    commute_time_chain,
    eigensystem_simple,
    eigenvalue_multiset_residual,
    eigenvalues_simple,
    hitting_time,
    hitting_time_closed,
    intersection_mixing_bound,
    mixing_bound_compound,
    mixing_bound_simple,
    moran_complete_mixing_bound,
    numeric_eigenvalues,
    permute_vector,
    phi,
    psi,
    q_matrix,
    recurrent_class,
    sign_lex_order,
    simple_tv_bound,
    spectrum,
    stationary_closed_form,
    stationary_numeric,
    to_dot,
    tv_decay,
    tv_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
