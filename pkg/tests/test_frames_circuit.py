import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import outcome_distribution, random_circuit

from narrowqec.stabilizer_sim import (Circuit, CircuitError, FrameSimulator, NoiseModel, pack_bits,
                                      run_tableau, sample_run, stream, unpack_bits)
from narrowqec.stabilizer_sim.frames import parities
from narrowqec.surface_code import PatchDims, build_memory_circuit


class OneFault:
    """Noise stand-in that fires a fixed Pauli at exactly one site (sites are visited in order)."""

    p = 1.0

    def __init__(self, site: int, label: str):
        self.site, self.label, self.calls = site, label, 0

    def sample(self, arity, rng):
        hit = self.calls == self.site
        self.calls += 1
        return self.label if hit else None


@given(st.integers(1, 300).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n)))
def test_pack_round_trip(bits):
    a = np.array([bits], dtype=np.uint8)
    assert np.array_equal(unpack_bits(pack_bits(a), len(bits)), a)


def test_text_round_trip_surface_circuit():
    c = build_memory_circuit(PatchDims(3, 5), "X")
    assert Circuit.from_text(c.to_text()) == c


def test_text_format_parses_sectors_and_comments():
    text = "RZ 0\nRX 1  # prep\nTICK\nCNOT 1 0\nTICK\nMZ 0\nMX 1\nDETECTOR X 1\nOBSERVABLE 0 0 1\n"
    c = Circuit.from_text(text)
    assert c.num_measurements == 2
    assert c.detector_basis(0) == "X"
    assert c.observables == [(0, 1)]


@pytest.mark.parametrize("text", ["FOO 0", "CNOT 0 0", "H 0 1", "MZ 0\nDETECTOR 3", "H 0\nS 0", "H x"])
def test_bad_text_rejected(text):
    with pytest.raises(CircuitError):
        Circuit.from_text(text)


def test_noise_site_placement():
    c = Circuit.from_text("RZ 0\nTICK\nCNOT 0 1\nTICK\nMZ 0", num_qubits=3)
    kinds = [(s.tick, s.when, s.qubits, s.cause) for s in c.noise_sites()]
    assert (0, "after", (0,), "RZ") in kinds
    assert (0, "before", (1,), "IDLE") in kinds
    assert (1, "before", (0, 1), "CNOT") in kinds
    assert (2, "before", (0,), "MZ") in kinds
    assert not any(s.when == "before" and s.cause == "RZ" for s in c.noise_sites())


def test_noiseless_detectors_are_quiet():
    c = build_memory_circuit(PatchDims(3, 3), "Z")
    for shot in range(5):
        det, obs = sample_run(c, None, seed=1, shot=shot)
        assert not det.any() and not obs.any()


@pytest.mark.parametrize("basis", ["X", "Z"])
def test_frames_match_tableau_single_faults(basis):
    c = build_memory_circuit(PatchDims(3, 3), basis)
    sim = FrameSimulator(c)
    rng = np.random.default_rng(5)
    picks = rng.choice(len(sim.sites), 60, replace=False)
    faults = []
    for i in picks:
        n = len(sim.sites[i].qubits)
        faults.append((int(i), "".join(rng.choice(list("XYZ"), n)) if n == 2 else str(rng.choice(list("XYZ")))))
    flips = sim.propagate_faults(faults)
    det = parities(flips, c.detectors)
    for col, (i, label) in enumerate(faults):
        meas = run_tableau(c, OneFault(i, label), stream(0, col))
        got = np.array([meas[list(g)].sum() % 2 for g in c.detectors])
        assert np.array_equal(got, det[:, col]), (i, label)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_tableau_outcomes_are_oracle_possible(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, ops=10)
    dist = outcome_distribution(c)
    g = stream(seed)
    for _ in range(20):
        assert tuple(int(b) for b in run_tableau(c, None, g)) in dist


def test_frame_sampler_rate_matches_tableau():
    c = build_memory_circuit(PatchDims(3, 3), "Z")
    noise = NoiseModel(0.01)
    flips = unpack_bits(FrameSimulator(c).sample(noise, 20_000, stream(3)), 20_000)
    frame_rate = parities(flips, c.detectors).mean()
    g = stream(4)
    tab = [run_tableau(c, noise, g) for _ in range(1500)]
    tab_rate = np.mean([[m[list(d)].sum() % 2 for d in c.detectors] for m in tab])
    # per-detector mean over ~30k and ~36k bits respectively
    assert abs(frame_rate - tab_rate) < 0.15 * frame_rate


def test_same_seed_same_shot():
    c = build_memory_circuit(PatchDims(3, 3), "Z")
    a = sample_run(c, NoiseModel(0.05), seed=9, shot=3)
    b = sample_run(c, NoiseModel(0.05), seed=9, shot=3)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_noise_channel_normalised():
    for arity, k in ((1, 3), (2, 15)):
        ch = NoiseModel(0.3).channel(arity)
        assert len(ch) == k + 1
        assert sum(ch.values()) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        NoiseModel(1.5)
