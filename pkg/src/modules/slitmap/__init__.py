"""Slitmap Module - Canonical Slit Maps from ER Fields.

Responsible for:
- Harmonic conjugates by path quadrature and a cached spoke network
- Chordal, bilateral and radial slit maps with their image slit data
- Level-curve tracing, separation checks and sublevel diagnostics
"""
