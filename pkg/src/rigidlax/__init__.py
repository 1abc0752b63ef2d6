"""Integrable rigid-body systems on e(3), so(n) x so(n) and e(4)."""

__version__ = "0.1.0"
