"""Sparse-regime geometric point process statistics and tail validation.

Submodules:

- ``geometry``: planar primitives and ball-intersection predicates
- ``pointproc``: Poisson/binomial sampling and regime bookkeeping
- ``spatial``: grid-accelerated tuple enumeration and isolation indicators
- ``functionals``: score functions and the counting statistics built on them
- ``persistence2d``: Delaunay/alpha filtration and dimension-1 persistence
- ``rates``: score-value laws, log-MGFs, rate functions, entropy duality
- ``harness``: replicated Monte Carlo experiments and slope fits
- ``cli``: the ``geomtail`` command-line entry point
"""

__version__ = "0.1.0"
