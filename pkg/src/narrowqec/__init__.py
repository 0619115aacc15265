"""Resource estimation for quantum error correction on fixed-width qubit arrays."""

__version__ = "0.1.0"
