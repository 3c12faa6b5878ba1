"""Exact desk-scale arithmetic for short character sums at norm forms."""

__version__ = "0.1.0"
