"""Build orchestration for OMNeT++ simulation projects."""

__version__ = "0.1.0"
