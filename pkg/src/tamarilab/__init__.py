"""Exact enumeration, sampling and moment asymptotics for Tamari intervals."""

__version__ = "0.1.0"
