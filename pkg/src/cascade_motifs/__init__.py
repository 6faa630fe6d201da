"""Motif-based analysis of information-cascade temporal networks."""
__version__ = "0.1.0"
