"""Instruction set, well-formedness rules, counting and serialization of
photon generation circuits.

Text format (one instruction per line after the header)::

    photons 4 emitters 2 ordering 1 2 3 4
    EMIT e1 p1
    H p1
    CNOT e2 e1
    MEAS e1 -> c0
    CX? c0 p3
    CZ? c0 e1

Qubits are ``p<k>`` (photon emitted ``k``-th) and ``e<k>`` (emitter ``k``),
both 1-based; classical bits ``c<k>`` are 0-based and numbered in
measurement order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

__all__ = [
    "CircuitError",
    "Qubit",
    "Instruction",
    "GenerationCircuit",
    "Counts",
    "serialize",
    "parse",
    "to_dict",
    "from_dict",
    "cancel_inverse_pairs",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1

SINGLE_QUBIT = ("H", "P", "PDAG", "X", "Z")
_INVERSE = {"H": "H", "P": "PDAG", "PDAG": "P", "X": "X", "Z": "Z", "CNOT": "CNOT"}


class CircuitError(ValueError):
    """Malformed circuit or circuit text."""


class Qubit(NamedTuple):
    role: str  # "p" or "e"
    index: int  # 1-based

    def __str__(self) -> str:
        return f"{self.role}{self.index}"

    @classmethod
    def parse(cls, token: str) -> "Qubit":
        if len(token) < 2 or token[0] not in "pe" or not token[1:].isdigit() or token[1:] == "0":
            raise CircuitError(f"bad qubit {token!r}")
        return cls(token[0], int(token[1:]))


def photon(k: int) -> Qubit:
    return Qubit("p", k)


def emitter(k: int) -> Qubit:
    return Qubit("e", k)


@dataclass(frozen=True)
class Instruction:
    """One operation.

    ``op`` is one of ``H P PDAG X Z`` (one qubit), ``CNOT`` (control, target),
    ``EMIT`` (emitter, photon), ``MEAS`` (emitter; writes ``cbit``) or
    ``CX?`` / ``CZ?`` (Pauli on one qubit when ``cbit`` is 1).
    """

    op: str
    qubits: tuple[Qubit, ...]
    cbit: int | None = None

    def __str__(self) -> str:
        q = " ".join(map(str, self.qubits))
        if self.op == "MEAS":
            return f"MEAS {q} -> c{self.cbit}"
        if self.op in ("CX?", "CZ?"):
            return f"{self.op} c{self.cbit} {q}"
        return f"{self.op} {q}"


class Counts(NamedTuple):
    emitter_cnots: int
    emissions: int
    measurements: int
    single_qubit_gates: int
    conditional_paulis: int

    @property
    def total_gates(self) -> int:
        """Unitary gates: single-qubit + emitter CNOTs + emissions."""
        return self.single_qubit_gates + self.emitter_cnots + self.emissions

    def as_dict(self) -> dict:
        d = self._asdict()
        d["total_gates"] = self.total_gates
        return d


@dataclass
class GenerationCircuit:
    n_photons: int
    n_emitters: int
    instructions: list[Instruction] = field(default_factory=list)
    ordering: tuple[int, ...] | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ordering is None:
            self.ordering = tuple(range(1, self.n_photons + 1))
        self.ordering = tuple(self.ordering)

    @property
    def n_qubits(self) -> int:
        return self.n_photons + self.n_emitters

    def index(self, q: Qubit) -> int:
        """0-based register index: photons first, then emitters."""
        return q.index - 1 if q.role == "p" else self.n_photons + q.index - 1

    @property
    def counts(self) -> Counts:
        c = {"CNOT": 0, "EMIT": 0, "MEAS": 0, "single": 0, "cond": 0}
        for ins in self.instructions:
            if ins.op in SINGLE_QUBIT:
                c["single"] += 1
            elif ins.op in ("CX?", "CZ?"):
                c["cond"] += 1
            else:
                c[ins.op] += 1
        return Counts(c["CNOT"], c["EMIT"], c["MEAS"], c["single"], c["cond"])

    def validate(self) -> None:
        """Raise :class:`CircuitError` on any violated structural rule."""
        if self.n_photons < 0 or self.n_emitters < 0:
            raise CircuitError("negative register size")
        if sorted(self.ordering) != list(range(1, self.n_photons + 1)):
            raise CircuitError("ordering is not a permutation of the photons")
        emitted: set[int] = set()
        measured = 0
        for k, ins in enumerate(self.instructions, 1):
            where = f"instruction {k} ({ins})"
            for q in ins.qubits:
                limit = self.n_photons if q.role == "p" else self.n_emitters
                if q.role not in ("p", "e") or not 1 <= q.index <= limit:
                    raise CircuitError(f"{where}: qubit out of range")
            roles = [q.role for q in ins.qubits]
            if ins.op in SINGLE_QUBIT or ins.op in ("CX?", "CZ?"):
                if len(ins.qubits) != 1:
                    raise CircuitError(f"{where}: expects one qubit")
            elif ins.op == "CNOT":
                if roles != ["e", "e"] or ins.qubits[0] == ins.qubits[1]:
                    raise CircuitError(f"{where}: CNOT must act on two distinct emitters")
            elif ins.op == "EMIT":
                if roles != ["e", "p"]:
                    raise CircuitError(f"{where}: EMIT takes an emitter then a photon")
            elif ins.op == "MEAS":
                if roles != ["e"]:
                    raise CircuitError(f"{where}: only emitters are measured")
            else:
                raise CircuitError(f"{where}: unknown operation")
            for q in ins.qubits:
                if q.role == "p":
                    if ins.op == "EMIT":
                        if q.index in emitted:
                            raise CircuitError(f"{where}: photon emitted twice")
                    elif q.index not in emitted:
                        raise CircuitError(f"{where}: photon used before emission")
            if ins.op == "EMIT":
                emitted.add(ins.qubits[1].index)
            if ins.op == "MEAS":
                if ins.cbit != measured:
                    raise CircuitError(f"{where}: classical bits must be c0, c1, ... in order")
                measured += 1
            elif ins.op in ("CX?", "CZ?"):
                if ins.cbit is None or not 0 <= ins.cbit < measured:
                    raise CircuitError(f"{where}: classical bit not yet measured")
            elif ins.cbit is not None:
                raise CircuitError(f"{where}: unexpected classical bit")
        if len(emitted) != self.n_photons:
            raise CircuitError(f"{self.n_photons - len(emitted)} photons never emitted")

    def emission_order(self) -> list[int]:
        return [i.qubits[1].index for i in self.instructions if i.op == "EMIT"]


def serialize(circuit: GenerationCircuit) -> str:
    circuit.validate()
    head = f"photons {circuit.n_photons} emitters {circuit.n_emitters} ordering"
    head += "".join(f" {v}" for v in circuit.ordering)
    return "\n".join([head, *map(str, circuit.instructions)]) + "\n"


def _parse_instruction(tokens: list[str]) -> Instruction:
    op = tokens[0]
    if op == "MEAS":
        if len(tokens) != 4 or tokens[2] != "->":
            raise CircuitError("expected 'MEAS e<k> -> c<j>'")
        return Instruction(op, (Qubit.parse(tokens[1]),), _parse_cbit(tokens[3]))
    if op in ("CX?", "CZ?"):
        if len(tokens) != 3:
            raise CircuitError(f"expected '{op} c<j> <qubit>'")
        return Instruction(op, (Qubit.parse(tokens[2]),), _parse_cbit(tokens[1]))
    arity = 1 if op in SINGLE_QUBIT else 2 if op in ("CNOT", "EMIT") else None
    if arity is None:
        raise CircuitError(f"unknown operation {op!r}")
    if len(tokens) != arity + 1:
        raise CircuitError(f"{op} takes {arity} qubit(s)")
    return Instruction(op, tuple(Qubit.parse(t) for t in tokens[1:]))


def _parse_cbit(token: str) -> int:
    if len(token) < 2 or token[0] != "c" or not token[1:].isdigit():
        raise CircuitError(f"bad classical bit {token!r}")
    return int(token[1:])


def parse(text: str) -> GenerationCircuit:
    """Inverse of :func:`serialize`; errors carry line numbers."""
    lines = [(k, ln.strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise CircuitError("empty circuit text")
    k0, head = lines[0]
    t = head.split()
    try:
        if t[0] != "photons" or t[2] != "emitters" or t[4] != "ordering":
            raise ValueError
        np_, ne = int(t[1]), int(t[3])
        ordering = tuple(int(v) for v in t[5:])
    except (ValueError, IndexError):
        raise CircuitError(f"line {k0}: bad header {head!r}") from None
    instructions = []
    for k, ln in lines[1:]:
        try:
            instructions.append(_parse_instruction(ln.split()))
        except CircuitError as exc:
            raise CircuitError(f"line {k}: {exc}") from None
    circuit = GenerationCircuit(np_, ne, instructions, ordering)
    try:
        circuit.validate()
    except CircuitError as exc:
        raise CircuitError(f"invalid circuit: {exc}") from None
    return circuit


def to_dict(circuit: GenerationCircuit) -> dict:
    """Machine-readable form; ``from_dict(to_dict(c))`` reproduces ``c``.

    Schema: ``{"schema": 1, "photons": int, "emitters": int, "ordering": [int],
    "instructions": [{"op": str, "qubits": [str], "cbit": int | null}],
    "counts": {...}}``. ``counts`` is informational and ignored on input.
    """
    circuit.validate()
    return {
        "schema": SCHEMA_VERSION,
        "photons": circuit.n_photons,
        "emitters": circuit.n_emitters,
        "ordering": list(circuit.ordering),
        "instructions": [
            {"op": i.op, "qubits": [str(q) for q in i.qubits], "cbit": i.cbit}
            for i in circuit.instructions
        ],
        "counts": circuit.counts.as_dict(),
    }


def from_dict(data: dict) -> GenerationCircuit:
    if data.get("schema") != SCHEMA_VERSION:
        raise CircuitError(f"unsupported schema {data.get('schema')!r}")
    try:
        instructions = [
            Instruction(d["op"], tuple(Qubit.parse(q) for q in d["qubits"]), d.get("cbit"))
            for d in data["instructions"]
        ]
        circuit = GenerationCircuit(data["photons"], data["emitters"], instructions,
                                    tuple(data["ordering"]))
    except (KeyError, TypeError) as exc:
        raise CircuitError(f"malformed circuit record: {exc}") from None
    circuit.validate()
    return circuit


def dumps(circuit: GenerationCircuit) -> str:
    return json.dumps(to_dict(circuit), indent=1)


def cancel_inverse_pairs(instructions: Iterable[Instruction]) -> list[Instruction]:
    """Drop gate pairs ``U, U^-1`` with nothing touching their qubits in between."""
    out: list[Instruction | None] = []
    stacks: dict[Qubit, list[int]] = {}
    for ins in instructions:
        if ins.op in _INVERSE:
            tops = {stacks[q][-1] if stacks.get(q) else None for q in ins.qubits}
            if len(tops) == 1:
                (k,) = tops
                prev = out[k] if k is not None else None
                if (prev is not None and prev.qubits == ins.qubits
                        and prev.op == _INVERSE[ins.op]):
                    out[k] = None
                    for q in ins.qubits:
                        stacks[q].pop()
                    continue
        out.append(ins)
        for q in ins.qubits:
            stacks.setdefault(q, []).append(len(out) - 1)
    return [i for i in out if i is not None]
