"""CLI Module - Command-Line Surface.

Responsible for:
- Parsing commands and flags, loading and validating domain files
- Reports (key = value # tolerance), CSV grids and SVG figures
- The invariant validation suite over the bundled domains
"""
