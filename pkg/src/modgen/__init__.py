"""Search-based modular test generation for the MiniOO language."""

__version__ = "0.1.0"
