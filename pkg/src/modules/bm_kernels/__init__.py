"""BM Kernels Module - Potential Theory for Killed Brownian Motion.

Responsible for:
- Dirichlet solves by a Nyström boundary integral method
- Green's function, Poisson kernel and boundary Poisson kernel
- Harmonic measure, excursion measure and the harmonic-measure basis ω_i
- Flux integrals of harmonic fields across closed curves
"""
