"""Hamilton cycles and circles in claw-free graphs with controlled paws."""

__version__ = "0.1.0"
