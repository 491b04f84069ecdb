"""Sampler Module - Monte Carlo ERBM.

Responsible for:
- Walk-on-spheres exits and ERBM paths with collar restarts
- Empirical exit distributions, component-hit chains and occupation densities
- Deterministic per-worker random streams
"""
