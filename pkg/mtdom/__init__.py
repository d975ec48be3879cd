"""Dominance checks for multi-target decisions under imprecise probabilities."""

__version__ = "0.1.0"
