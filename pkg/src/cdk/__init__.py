"""Cartesian differential categories over symbolic smooth maps."""
