"""Executable A-infinity / noncommutative symplectic correspondence."""

__version__ = "0.1.0"
