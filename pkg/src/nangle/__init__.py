"""Verification workbench for exotic n-angulated categories over Z/p^2 and F_p[e]/(e^2)."""

__version__ = "0.1.0"
