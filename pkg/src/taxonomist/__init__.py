"""Workbench for building, validating, and monitoring hierarchical LLM text classifiers."""

__version__ = "0.1.0"
