"""Spectral statistics of random graph Laplacians.

Sampling of Erdos-Renyi graphs and their (centered, rotated) Laplacians,
eigenvalue gap statistics, eigenvector delocalization diagnostics,
certified least-common-denominator scans, small-ball probabilities,
overcrowding statistics and continuous-time quantum walks.
"""

__version__ = "0.1.0"

from lapgap.rng import derive_seed, stream
from lapgap.graphs import (
    GraphFormatError,
    GraphSample,
    MatrixInstance,
    Role,
    centered_laplacian,
    expected_laplacian,
    laplacian,
    load_graph,
    rotate_last_two,
    sample_gnp,
    store_graph,
    switch_neighbors,
)
from lapgap.spectra import SpectralDecomposition, eigh, gaps, operator_norm, singular_values

__all__ = [
    "GraphFormatError",
    "GraphSample",
    "MatrixInstance",
    "Role",
    "SpectralDecomposition",
    "centered_laplacian",
    "derive_seed",
    "eigh",
    "expected_laplacian",
    "gaps",
    "laplacian",
    "load_graph",
    "operator_norm",
    "rotate_last_two",
    "sample_gnp",
    "singular_values",
    "store_graph",
    "stream",
    "switch_neighbors",
]
