"""courtcanvas: an authoring engine for augmented sports-video highlights.

Composes player- and court-anchored visualizations onto video frames using
tracking data and foreground mattes, under an editable non-linear timeline
with undo/redo, and exports deterministic augmented video.
"""

__version__ = "0.1.0"

__all__ = [
    "cli",
    "compositor",
    "export",
    "font",
    "geometry",
    "ingest",
    "model",
    "raster",
    "service",
    "session",
    "synth",
    "timeline",
]
