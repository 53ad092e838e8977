"""Deterministic human-in-the-loop simulator of a learning-enabled
sensor-monitoring autonomy, with trace-level requirement checking."""

__version__ = "0.1.0"
