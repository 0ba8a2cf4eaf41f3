"""Online committee learning with majority voting."""

__version__ = "0.1.0"
