"""Exact verification of L-infinity observables on pre-n-plectic manifolds."""

__version__ = "0.1.0"
