"""Graph Fourier transforms and a GFT-augmented message-passing classifier
for network failure classification."""
from .graph import (
    Graph,
    cartesian_product,
    cycle_graph,
    knn_graph,
    kronecker_sum,
    laplacian,
    new_graph,
    path_graph,
)
from .spectral import (
    Eigensystem,
    Spectrum,
    Spectrum2D,
    eigendecompose_symmetric,
    gft,
    igft,
    itwin_gft,
    product_eigensystem,
    product_pairs,
    twin_gft,
)

__version__ = "0.1.0"
