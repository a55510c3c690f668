"""Similarity measures over citation graphs.

>>> import citesim
>>> g = citesim.fixtures.tg1()
>>> m, report = citesim.compute(g, "crank")
>>> citesim.top_k(m, g.find("e"), 3)[0][0] == g.find("f")
True
"""

from ._citesim import (
    ConfigError,
    DataError,
    Graph,
    Matrix,
    compute,
    converge,
    convergence_trace,
    fixtures,
    histogram,
    precision_at_m,
    reduction_check,
    run_benchmark,
    top_k,
)

MEASURES = ("cocitation", "coupling", "amsler", "simrank", "rvs_simrank", "prank", "crank")

__all__ = [
    "ConfigError",
    "DataError",
    "Graph",
    "MEASURES",
    "Matrix",
    "compute",
    "converge",
    "convergence_trace",
    "fixtures",
    "histogram",
    "precision_at_m",
    "reduction_check",
    "run_benchmark",
    "top_k",
]
