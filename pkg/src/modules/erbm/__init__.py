"""ERBM Module - Excursion-Reflected Brownian Motion Kernels.

Responsible for:
- The period (flux) matrix of the harmonic-measure basis across collars
- ER-harmonic solves: ER Poisson kernel, ER Green's functions, ER harmonic measure
- Restart densities on collar curves and the boundary component-hit chain
"""
