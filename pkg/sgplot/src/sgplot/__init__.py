"""Static-figure renderer for sgsim experiment CSVs."""

__version__ = "0.1.0"
