"""Geometry Module - Smooth Multiply Connected Domains.

Responsible for:
- Parametric boundary curves (circle, ellipse, Fourier) and their derivatives
- Domain validity (simplicity, nesting, clearance) and the domain file format
- Collar curves around holes used by ERBM restarts and flux integrals
- Nearest-boundary queries shared by the sampler and path routing
"""
