"""Timestep-ordered Clifford circuit IR with detectors and observables.

Text format, one item per line::

    RZ 0
    H 1
    TICK
    CNOT 1 0
    TICK
    MZ 0
    MX 1
    DETECTOR 0
    OBSERVABLE 0 0 1

``TICK`` closes a timestep.  Measurement indices count every ``MZ``/``MX``
in emission order starting at zero.  ``#`` starts a comment.  A detector may
name its CSS sector explicitly (``DETECTOR X 4 9``); otherwise the sector is
the shared basis of its measurements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

ONE_QUBIT_GATES = ("H", "S")
TWO_QUBIT_GATES = ("CNOT", "CZ")
RESETS = ("RZ", "RX")
MEASUREMENTS = ("MZ", "MX")
ALL_OPS = ONE_QUBIT_GATES + TWO_QUBIT_GATES + RESETS + MEASUREMENTS


class CircuitError(ValueError):
    pass


class Instruction(NamedTuple):
    name: str
    targets: tuple[int, ...]

    def __str__(self):
        return " ".join([self.name, *map(str, self.targets)])


class NoiseSite(NamedTuple):
    """A depolarizing-channel placement.

    ``when`` is ``"before"`` (gate, measurement, idle) or ``"after"`` (reset).
    ``tick`` is the timestep index and ``qubits`` has one or two entries.
    """

    tick: int
    when: str
    qubits: tuple[int, ...]
    cause: str


@dataclass
class Circuit:
    num_qubits: int
    timesteps: list[list[Instruction]] = field(default_factory=list)
    detectors: list[tuple[int, ...]] = field(default_factory=list)
    observables: list[tuple[int, ...]] = field(default_factory=list)
    # per-detector and per-observable position (number of measurements emitted when declared)
    _detector_marks: list[int] = field(default_factory=list, repr=False)
    _observable_marks: list[int] = field(default_factory=list, repr=False)
    _measurements: list[tuple[int, str]] = field(default_factory=list, repr=False)
    _detector_sectors: list[str | None] = field(default_factory=list, repr=False)

    # -- building -------------------------------------------------------
    def tick(self) -> None:
        self.timesteps.append([])

    def append(self, name: str, *targets: int) -> int | None:
        """Add an instruction to the current timestep; returns the measurement index for MZ/MX."""
        if name not in ALL_OPS:
            raise CircuitError(f"unknown instruction {name!r}")
        arity = 2 if name in TWO_QUBIT_GATES else 1
        if len(targets) != arity:
            raise CircuitError(f"{name} takes {arity} target(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise CircuitError(f"repeated target in {name} {targets}")
        for q in targets:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits} qubits")
        if not self.timesteps:
            self.tick()
        busy = {q for ins in self.timesteps[-1] for q in ins.targets}
        if busy & set(targets):
            raise CircuitError(f"qubit reused within one timestep: {name} {targets}")
        self.timesteps[-1].append(Instruction(name, tuple(int(t) for t in targets)))
        if name in MEASUREMENTS:
            self._measurements.append((targets[0], name[1]))
            return len(self._measurements) - 1
        return None

    def add_detector(self, measurements: Iterable[int], sector: str | None = None) -> int:
        ms = tuple(sorted(int(m) for m in measurements))
        self._check_refs(ms)
        if sector not in (None, "X", "Z"):
            raise CircuitError(f"sector must be 'X' or 'Z', got {sector!r}")
        self.detectors.append(ms)
        self._detector_sectors.append(sector)
        self._detector_marks.append(self.num_measurements)
        return len(self.detectors) - 1

    def add_observable(self, index: int, measurements: Iterable[int]) -> None:
        ms = tuple(sorted(int(m) for m in measurements))
        self._check_refs(ms)
        while len(self.observables) <= index:
            self.observables.append(())
            self._observable_marks.append(0)
        merged = sorted(set(self.observables[index]) ^ set(ms))
        self.observables[index] = tuple(merged)
        self._observable_marks[index] = self.num_measurements

    def _check_refs(self, ms):
        for m in ms:
            if not 0 <= m < self.num_measurements:
                raise CircuitError(f"measurement {m} referenced before it was emitted")

    # -- queries --------------------------------------------------------
    @property
    def num_measurements(self) -> int:
        return len(self._measurements)

    @property
    def measurements(self) -> list[tuple[int, str]]:
        """(qubit, basis) for every measurement in emission order."""
        return list(self._measurements)

    def detector_basis(self, k: int) -> str:
        """'Z' or 'X': the CSS sector of detector k (explicit, or the basis shared by its measurements)."""
        if k < len(self._detector_sectors) and self._detector_sectors[k]:
            return self._detector_sectors[k]
        bases = {self._measurements[m][1] for m in self.detectors[k]}
        if len(bases) != 1:
            raise CircuitError(f"detector {k} mixes measurement bases")
        return bases.pop()

    def noise_sites(self) -> list[NoiseSite]:
        """Channel placements: 1q before gates/measurements, after resets and on idlers; 2q before 2q gates."""
        sites = []
        for t, layer in enumerate(self.timesteps):
            busy = set()
            for ins in layer:
                busy.update(ins.targets)
                if ins.name in RESETS:
                    continue
                sites.append(NoiseSite(t, "before", ins.targets, ins.name))
            for q in range(self.num_qubits):
                if q not in busy:
                    sites.append(NoiseSite(t, "before", (q,), "IDLE"))
            for ins in layer:
                if ins.name in RESETS:
                    sites.append(NoiseSite(t, "after", ins.targets, ins.name))
        return sites

    # -- text format ----------------------------------------------------
    def to_text(self) -> str:
        lines = []
        measured = 0
        det_iter = iter(sorted(range(len(self.detectors)), key=lambda k: self._detector_marks[k]))
        pending = next(det_iter, None)
        obs_order = sorted(range(len(self.observables)), key=lambda k: self._observable_marks[k])
        obs_ptr = 0
        for t, layer in enumerate(self.timesteps):
            if t:
                lines.append("TICK")
            for ins in layer:
                lines.append(str(ins))
                if ins.name in MEASUREMENTS:
                    measured += 1
            while pending is not None and self._detector_marks[pending] <= measured:
                sector = self._detector_sectors[pending] if pending < len(self._detector_sectors) else None
                head = ["DETECTOR"] + ([sector] if sector else [])
                lines.append(" ".join(head + [str(m) for m in self.detectors[pending]]))
                pending = next(det_iter, None)
            while obs_ptr < len(obs_order) and self._observable_marks[obs_order[obs_ptr]] <= measured:
                k = obs_order[obs_ptr]
                lines.append(" ".join(["OBSERVABLE", str(k), *map(str, self.observables[k])]))
                obs_ptr += 1
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, num_qubits: int | None = None) -> "Circuit":
        parsed = []
        highest = -1
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            sector = None
            if head.upper() == "DETECTOR" and rest and rest[0].upper() in ("X", "Z"):
                sector, rest = rest[0].upper(), rest[1:]
            try:
                args = [int(a) for a in rest]
            except ValueError:
                raise CircuitError(f"line {lineno}: non-integer argument in {raw!r}") from None
            parsed.append((lineno, head.upper(), args, sector))
            if head.upper() in ALL_OPS:
                highest = max([highest, *args])
        c = cls(num_qubits if num_qubits is not None else highest + 1)
        c.tick()
        for lineno, head, args, sector in parsed:
            try:
                if head == "TICK":
                    c.tick()
                elif head == "DETECTOR":
                    c.add_detector(args, sector)
                elif head == "OBSERVABLE":
                    if not args:
                        raise CircuitError("OBSERVABLE needs an index")
                    c.add_observable(args[0], args[1:])
                else:
                    c.append(head, *args)
            except CircuitError as err:
                raise CircuitError(f"line {lineno}: {err}") from None
        return c

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and self.timesteps == other.timesteps
            and self.detectors == other.detectors
            and [self.detector_basis(k) for k in range(len(self.detectors))]
            == [other.detector_basis(k) for k in range(len(other.detectors))]
            and self.observables == other.observables
        )
