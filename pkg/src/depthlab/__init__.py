"""depthlab: game depth, playing-level complexity and first-move rules."""
__version__ = "0.1.0"
