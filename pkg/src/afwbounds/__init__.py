"""Entropic continuity, semicontinuity and local lower bounds with numerical certification."""

__version__ = "0.1.0"
