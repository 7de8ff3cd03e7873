"""Sigma(p) sets of matrix coordinates seen as bipartite graphs."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    COL,
    ROW,
    BipartiteSet,
    RudinReport,
    Trail,
    Vertex,
    col,
    count_trails,
    degree,
    enumerate_trails,
    find_circuit,
    from_edge_list,
    has_circuit,
    induced_subgraph,
    row,
    rudin_sup,
)
from .schatten import (  # noqa: E402
    BlockMatrix,
    hermitian_eigenvalues,
    schatten_norm,
    schatten_norm_even_trace,
    triple_norm,
    triple_norm_operator_valued,
)
from .sigma import (  # noqa: E402
    SigmaEstimate,
    circuit_bound,
    density_bound,
    pisier_trail_bound,
    ratio_constant_estimate,
    sign_unconditionality_estimate,
)
