"""
peakkit - peak functions, Shilov boundaries and proper maps, computed

Subpackages:
- numerics: polynomials, Mobius geometry, expression trees, sampling
- sympoly: the symmetrized polydisc
- reinhardt: log-polyhedral Reinhardt domains and Laurent peak sequences
- transfer: proper maps, forward/backward peak transfer, c-finite probes
- cconvex: weak peak functions for convex bodies
- cli: command line entry point and the peak verification protocol
"""

__version__ = "1.0.0"
