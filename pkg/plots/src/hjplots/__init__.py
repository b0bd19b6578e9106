"""Batch figure renderer for the hjdecay CLI's delimited outputs.

Reads only the CSV files the solver CLI writes (never imports the
solver), and renders publication-style figures described by a small
JSON manifest.
"""

__version__ = "0.1.0"
