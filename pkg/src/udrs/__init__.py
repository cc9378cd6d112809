"""Reasoning with scope-underspecified discourse representation structures."""
from .core import Database, Udrs, UdrsError, validate
from .syntax import parse_udrs, print_udrs

__version__ = "0.1.0"
__all__ = ["Database", "Udrs", "UdrsError", "validate", "parse_udrs", "print_udrs"]
