"""Signed link analysis with social-theory guided features."""

__version__ = "0.1.0"
