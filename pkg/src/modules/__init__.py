"""Modules package - one package per toolkit module, each exposing service.py."""
