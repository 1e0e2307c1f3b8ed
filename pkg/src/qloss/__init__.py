"""Loss mitigation for single-rail photonic teleportation and superdense coding."""

__version__ = "0.1.0"
