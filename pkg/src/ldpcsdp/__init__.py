"""Optimal LDPC degree distributions for the binary erasure channel via SDP."""

__version__ = "0.1.0"
