"""Stabilizer circuits: Pauli algebra, CHP tableau, Pauli frames and noise channels."""
from .circuit import Circuit, CircuitError, Instruction, NoiseSite
from .frames import FrameSimulator, pack_bits, unpack_bits
from .noise import NoiseModel
from .pauli import PauliString
from .rng import stream
from .sample import run_tableau, sample_run
from .tableau import Tableau, apply_gate, measure

__all__ = [
    "Circuit", "CircuitError", "Instruction", "NoiseSite", "FrameSimulator", "pack_bits",
    "unpack_bits", "NoiseModel", "PauliString", "stream", "run_tableau", "sample_run",
    "Tableau", "apply_gate", "measure",
]
