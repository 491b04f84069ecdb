"""ERBM Conformal Toolkit.

Potential theory for excursion-reflected Brownian motion on bounded, finitely
connected planar domains, the slit-domain conformal maps built from it, and a
walk-on-spheres sampler that cross-checks the deterministic results. Modules
follow the same modular-monolith layout: each package exposes a service.py
public interface.
"""

__version__ = "1.0.0"
