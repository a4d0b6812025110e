"""qsynth: circuit builders for exact Grover search, qRAM-driven unitary
implementation, low-depth state preparation, and the dense simulator that
verifies them."""

__version__ = "0.1.0"
