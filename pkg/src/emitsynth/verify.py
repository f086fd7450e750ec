"""Stabilizer simulation of generation circuits and exact verification.

This is a separate implementation from :mod:`emitsynth.pauli`: it uses the
Aaronson-Gottesman layout (destabilizers in rows ``0..n-1``, stabilizers in
rows ``n..2n-1``, Hermitian sign bits) on numpy ``uint8`` arrays, with its own
gate update rules. Only the target's raw ``x``/``z``/``phase`` integers are read
from the other module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitError, GenerationCircuit, Instruction
from .pauli import StabilizerTableau

__all__ = [
    "VerificationError",
    "SimState",
    "Branch",
    "simulate",
    "states_equal",
    "verify",
    "VerificationReport",
]


class VerificationError(ValueError):
    """Simulation could not run (too many branches, size mismatch)."""


class SimState:
    """Stabilizer state with destabilizers on ``n`` qubits."""

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1
        self.z[n + idx, idx] = 1
        self.bits: list[int] = []

    def copy(self) -> "SimState":
        s = SimState.__new__(SimState)
        s.n = self.n
        s.x, s.z, s.r = self.x.copy(), self.z.copy(), self.r.copy()
        s.bits = list(self.bits)
        return s

    # gates ---------------------------------------------------------------
    def h(self, a: int) -> None:
        x, z = self.x[:, a].copy(), self.z[:, a].copy()
        self.r ^= x & z
        self.x[:, a], self.z[:, a] = z, x

    def s(self, a: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def sdg(self, a: int) -> None:
        # S^dagger = S^3
        for _ in range(3):
            self.s(a)

    def px(self, a: int) -> None:
        self.r ^= self.z[:, a]

    def pz(self, a: int) -> None:
        self.r ^= self.x[:, a]

    def cnot(self, c: int, t: int) -> None:
        x, z = self.x, self.z
        self.r ^= x[:, c] & z[:, t] & (x[:, t] ^ z[:, c] ^ 1)
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]

    # measurement ---------------------------------------------------------
    @staticmethod
    def _g(x1, z1, x2, z2):
        """Exponent of i picked up when multiplying Pauli (x1,z1) onto (x2,z2)."""
        x1, z1, x2, z2 = (v.astype(np.int8) for v in (x1, z1, x2, z2))
        return np.where(
            (x1 == 1) & (z1 == 1), z2 - x2,
            np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
        )

    def _rowsum(self, h: int, i: int) -> None:
        total = 2 * int(self.r[h]) + 2 * int(self.r[i]) + int(
            self._g(self.x[i], self.z[i], self.x[h], self.z[h]).sum())
        self.r[h] = (total % 4) // 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def is_random(self, a: int) -> bool:
        return bool(self.x[self.n:, a].any())

    def measure(self, a: int, outcome: int | None = None) -> tuple[int, bool]:
        """Z measurement of qubit ``a``; returns (bit, was_random).

        For a random outcome ``outcome`` selects the branch (0 if ``None``).
        Deterministic outcomes ignore ``outcome``.
        """
        n = self.n
        stab = np.nonzero(self.x[n:, a])[0]
        if stab.size:
            p = n + int(stab[0])
            for i in np.nonzero(self.x[:, a])[0]:
                i = int(i)
                if i != p:
                    self._rowsum(i, p)
            d = p - n
            self.x[d], self.z[d], self.r[d] = self.x[p], self.z[p], self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            bit = 0 if outcome is None else int(outcome)
            self.r[p] = bit
            return bit, True
        # deterministic: accumulate stabilizers paired with destabilizers having X on a
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        phase = 0
        for i in np.nonzero(self.x[:n, a])[0]:
            i = int(i) + n
            phase += 2 * int(self.r[i]) + int(self._g(self.x[i], self.z[i], sx, sz).sum())
            sx ^= self.x[i]
            sz ^= self.z[i]
        return (phase % 4) // 2, False

    # inspection ----------------------------------------------------------
    def stabilizer_sign(self, px: np.ndarray, pz: np.ndarray) -> int | None:
        """+1/-1 if the Pauli (sign +) or its negative is in the group, else ``None``."""
        n = self.n
        sympl = (self.x[n:] @ pz + self.z[n:] @ px) % 2
        if sympl.any():
            return None
        # coefficient of stabilizer k is the commutator with destabilizer k
        coeff = (self.x[:n] @ pz + self.z[:n] @ px) % 2
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        phase = 0
        for k in np.nonzero(coeff)[0]:
            i = int(k) + n
            phase += 2 * int(self.r[i]) + int(self._g(self.x[i], self.z[i], sx, sz).sum())
            sx ^= self.x[i]
            sz ^= self.z[i]
        if (sx != px).any() or (sz != pz).any():
            return None
        return 1 if phase % 4 == 0 else -1

    def stabilizer_labels(self) -> list[str]:
        n = self.n
        out = []
        for i in range(n, 2 * n):
            body = "".join("IXZY"[int(self.x[i, q]) + 2 * int(self.z[i, q])] for q in range(n))
            out.append(("-" if self.r[i] else "+") + body)
        return out


_APPLY = {
    "H": SimState.h,
    "P": SimState.s,
    "PDAG": SimState.sdg,
    "X": SimState.px,
    "Z": SimState.pz,
}


@dataclass
class Branch:
    state: SimState
    outcomes: tuple[int, ...]
    random_mask: tuple[bool, ...]


def _run(circuit: GenerationCircuit, state: SimState, start: int, choose, branches: list,
         outcomes: list[int], randomness: list[bool], cap: int) -> None:
    instrs = circuit.instructions
    idx = circuit.index
    for k in range(start, len(instrs)):
        ins: Instruction = instrs[k]
        op = ins.op
        if op in _APPLY:
            _APPLY[op](state, idx(ins.qubits[0]))
        elif op in ("CNOT", "EMIT"):
            state.cnot(idx(ins.qubits[0]), idx(ins.qubits[1]))
        elif op == "MEAS":
            a = idx(ins.qubits[0])
            if state.is_random(a):
                picks = choose(len(outcomes))
                if len(picks) > 1:
                    if len(branches) + len(picks) > cap:
                        raise VerificationError(f"more than {cap} measurement branches")
                    for bit in picks:
                        child = state.copy()
                        child.measure(a, bit)
                        child.bits.append(bit)
                        _run(circuit, child, k + 1, choose, branches, [*outcomes, bit],
                             [*randomness, True], cap)
                    return
                bit, _ = state.measure(a, picks[0])
                randomness.append(True)
            else:
                bit, _ = state.measure(a)
                randomness.append(False)
            state.bits.append(bit)
            outcomes.append(bit)
        elif op == "CX?":
            if state.bits[ins.cbit]:
                state.px(idx(ins.qubits[0]))
        elif op == "CZ?":
            if state.bits[ins.cbit]:
                state.pz(idx(ins.qubits[0]))
        else:  # pragma: no cover - rejected by validate()
            raise CircuitError(f"unknown op {op}")
    branches.append(Branch(state, tuple(outcomes), tuple(randomness)))


def simulate(circuit: GenerationCircuit, policy="enumerate", *, seed: int = 0,
             branch_cap: int = 4096) -> list[Branch]:
    """Run ``circuit`` from ``|0...0>``.

    ``policy`` is ``"enumerate"`` (every outcome of every random measurement),
    ``"random"`` (one branch, outcomes from ``numpy.random.default_rng(seed)``)
    or a sequence of bits used in order for the random measurements.
    Deterministic measurements always take their forced value.
    """
    circuit.validate()
    if isinstance(policy, str) and policy == "enumerate":
        choose = lambda k: (0, 1)  # noqa: E731
    elif isinstance(policy, str) and policy == "random":
        rng = np.random.default_rng(seed)
        choose = lambda k: (int(rng.integers(2)),)  # noqa: E731
    elif isinstance(policy, str):
        raise VerificationError(f"unknown policy {policy!r}")
    else:
        fixed = [int(b) for b in policy]
        counter = iter(fixed)

        def choose(k):
            try:
                return (next(counter),)
            except StopIteration:
                raise VerificationError("fixed outcome string too short") from None
    branches: list[Branch] = []
    _run(circuit, SimState(circuit.n_qubits), 0, choose, branches, [], [], branch_cap)
    return branches


def _target_rows(target: StabilizerTableau, n: int):
    for row in target.rows:
        px = np.array([(row.x >> q) & 1 for q in range(n)], dtype=np.uint8)
        pz = np.array([(row.z >> q) & 1 for q in range(n)], dtype=np.uint8)
        # i^phase X^x Z^z  ->  sign * Hermitian Pauli with Y = iXZ
        ny = int(np.sum(px & pz))
        sign = 1 if (row.phase - ny) % 4 == 0 else -1
        yield px, pz, sign


def states_equal(a: SimState, b: StabilizerTableau, *, emitters: int = 0) -> bool:
    """Whether ``a`` equals ``b`` tensored with ``|0>`` on ``emitters`` trailing qubits."""
    if a.n != b.n + emitters:
        raise VerificationError(f"size mismatch: {a.n} vs {b.n} + {emitters}")
    n = a.n
    for px, pz, sign in _target_rows(b, n):
        if a.stabilizer_sign(px, pz) != sign:
            return False
    for q in range(b.n, n):
        pz = np.zeros(n, dtype=np.uint8)
        pz[q] = 1
        if a.stabilizer_sign(np.zeros(n, dtype=np.uint8), pz) != 1:
            return False
    return True


@dataclass
class VerificationReport:
    passed: bool
    branches_checked: int
    mode: str
    counterexample: tuple[int, ...] | None = None
    detail: str = ""
    final_stabilizers: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"{status}: {self.branches_checked} branch(es) checked ({self.mode})"
        if not self.passed:
            out += f"\ncounterexample outcomes: {''.join(map(str, self.counterexample or ()))}"
            if self.detail:
                out += f"\n{self.detail}"
        return out

    def to_dict(self) -> dict:
        return {"passed": self.passed, "branches_checked": self.branches_checked,
                "mode": self.mode,
                "counterexample": list(self.counterexample) if self.counterexample is not None
                else None,
                "detail": self.detail}


def verify(circuit: GenerationCircuit, target: StabilizerTableau, *,
           enumerate_limit: int = 12, samples: int = 256, seed: int = 0) -> VerificationReport:
    """Check that every measurement branch yields ``target`` with emitters in ``|0>``.

    With at most ``enumerate_limit`` measurements all branches are enumerated;
    otherwise ``samples`` seeded random branches are drawn.
    """
    if target.n != circuit.n_photons:
        return VerificationReport(False, 0, "none",
                                  detail=f"target has {target.n} qubits, circuit "
                                         f"{circuit.n_photons} photons")
    k = circuit.counts.measurements
    if k <= enumerate_limit:
        branches = simulate(circuit, "enumerate", branch_cap=1 << enumerate_limit)
        mode = "enumerated"
    else:
        rng = np.random.default_rng(seed)
        seeds = rng.integers(0, 2**63 - 1, size=samples)
        branches = [b for s in seeds for b in simulate(circuit, "random", seed=int(s))]
        mode = f"{samples} random"
    for b in branches:
        if not states_equal(b.state, target, emitters=circuit.n_emitters):
            return VerificationReport(False, len(branches), mode, b.outcomes,
                                      "final state differs from target with emitters in |0>",
                                      b.state.stabilizer_labels())
    return VerificationReport(True, len(branches), mode)
