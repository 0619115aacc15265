"""Single-shot noisy execution on the tableau simulator."""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, CircuitError
from .noise import NoiseModel
from .rng import stream
from .tableau import Tableau


def run_tableau(c: Circuit, noise: NoiseModel | None, rng: np.random.Generator) -> np.ndarray:
    """Execute ``c`` once with Pauli faults at every noise site; returns raw measurement bits."""
    t = Tableau(c.num_qubits)
    sites = c.noise_sites()
    before: dict[int, list] = {}
    after: dict[int, list] = {}
    for s in sites:
        (before if s.when == "before" else after).setdefault(s.tick, []).append(s)
    out = np.zeros(c.num_measurements, dtype=np.uint8)
    m = 0

    def hit(site_list):
        if noise is None or noise.p == 0.0:
            return
        for s in site_list:
            P = noise.sample(len(s.qubits), rng)
            if P is not None:
                t.apply_pauli(P, s.qubits)

    for tick, layer in enumerate(c.timesteps):
        hit(before.get(tick, ()))
        for ins in layer:
            result = t.apply(ins, rng)
            if result is not None:
                out[m] = result
                m += 1
        hit(after.get(tick, ()))
    return out


def sample_run(c: Circuit, noise: NoiseModel | None, seed: int, shot: int = 0):
    """One reproducible shot; returns ``(detector_bits, observable_bits)``."""
    for group in (*c.detectors, *c.observables):
        if any(not 0 <= m < c.num_measurements for m in group):
            raise CircuitError(f"reference outside measurement range in {group}")
    meas = run_tableau(c, noise, stream(seed, shot))
    det = np.array([int(meas[list(g)].sum() % 2) for g in c.detectors], dtype=np.uint8)
    obs = np.array([int(meas[list(g)].sum() % 2) for g in c.observables], dtype=np.uint8)
    return det, obs
