"""Agentic radiology reporting engine: planner/executor loop, orchestrated
tools, template derivation, and an evaluation harness. All model inference
is delegated to pluggable backends."""

__version__ = "0.1.0"
