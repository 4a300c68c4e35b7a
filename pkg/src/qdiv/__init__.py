"""Quantum Renyi divergences, multi-state measures and their certified inequalities."""
__version__ = "0.1.0"
