"""Core infrastructure module.

Contains shared utilities: configuration, error hierarchy and logging setup.
"""
