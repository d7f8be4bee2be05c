"""Two-player shared-control maze coordination toolkit."""

__version__ = "0.1.0"
