"""Hybrid qubit-qumode simulator with trigonometric gate compilation and a
lattice sine-Gordon experiment suite."""

__version__ = "0.1.0"
