"""Time-reversed synthesis of photon generation circuits.

Starting from the target photons tensored with ``n_e`` emitters in ``|0>``,
photons are disentangled one at a time from the last emitted to the first.
Photon ``j`` is *absorbed* into an emitter (the inverse of an emission) once
some echelon-gauge generator starts at site ``j``; if none does, a
*time-reversed measurement* on an emitter first creates one. When every photon
is back in ``|0>`` the emitters are disentangled, and the recorded operation
list is inverted into the forward circuit.

Primitive operations are recorded on 0-based register indices, photons first
and emitters after them:

``("H"|"P"|"PDAG"|"X"|"Z", q)``, ``("CNOT", c, t)``
    Clifford gates (CNOTs here are always emitter-emitter).
``("ABSORB", i, j)``
    ``CNOT`` from emitter ``i`` onto photon ``j``; reverses to an emission.
``("UNMEASURE", i, j)``
    ``H_i`` then ``CNOT_ij``; reverses to measuring emitter ``i`` with
    outcome-conditioned ``X`` on photon ``j`` and emitter ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import circuit as ir
from .circuit import GenerationCircuit, Instruction, cancel_inverse_pairs
from .gf2 import bits
from .graphs import Graph, check_ordering, graph_stabilizers
from .pauli import StabilizerTableau, _heights, height

__all__ = [
    "SolverError",
    "SolverState",
    "MeasurementEvent",
    "num_emitters",
    "initial_state",
    "absorb_photon",
    "reverse_measurement",
    "disentangle_emitters",
    "solve",
    "solve_graph",
]


class SolverError(ValueError):
    """Target cannot be compiled (disconnected, empty, or wrong shape)."""


@dataclass(frozen=True)
class MeasurementEvent:
    """Heights around one time-reversed measurement (1-based sites)."""

    photon: int
    emitter_site: int
    before: tuple[int, ...]
    after: tuple[int, ...]


@dataclass
class SolverState:
    tableau: StabilizerTableau
    current_photon: int
    reversed_ops: list[tuple] = field(default_factory=list)
    decoupled: set[int] = field(default_factory=set)
    events: list[MeasurementEvent] = field(default_factory=list)

    @property
    def n_photons(self) -> int:
        return self.tableau.n_photons

    @property
    def n_emitters(self) -> int:
        return self.tableau.n_emitters

    def heights(self) -> list[int]:
        """Current height function; valid right after :func:`_refresh`."""
        t = self.tableau
        return _heights((t.left_end_of(k) for k in range(len(t))), t.n)


def num_emitters(target: StabilizerTableau) -> int:
    """Minimal emitter count: maximum photonic height, and at least one."""
    return max(1, height(target).h_max)


def initial_state(target: StabilizerTableau, n_emitters: int | None = None) -> SolverState:
    if target.n_emitters:
        raise SolverError("target must be a photon-only tableau")
    if n_emitters is None:
        n_emitters = num_emitters(target)
    t = target.with_emitters(n_emitters)
    t.reduce_rows(range(len(t)))
    return SolverState(t, current_photon=t.n_photons)


# -- helpers ------------------------------------------------------------------

def _gate(state: SolverState, *op) -> None:
    state.tableau.apply(op)
    state.reversed_ops.append(op)


def _refresh(state: SolverState, site: int) -> list[int]:
    """Re-reduce the rows starting at or right of 0-based ``site``.

    Rows further left are never touched by operations at ``site`` and beyond,
    so they keep their echelon form. Absorbed photons are skipped.
    """
    t = state.tableau
    active = [r for r in range(len(t))
              if r not in state.decoupled and t.left_end_of(r) >= site]
    return t.reduce_rows(active)


def _pauli(t: StabilizerTableau, r: int, q: int) -> int:
    return ((t._x[r] >> q) & 1) | (((t._z[r] >> q) & 1) << 1)


def _diagonalize(state: SolverState, r: int, sites: Sequence[int], sign_site: int) -> None:
    """Local Cliffords turning row ``r`` into ``+Z`` on every one of ``sites``.

    X maps to Z by H and Y by PDAG then H. A leftover minus sign is absorbed
    by using P instead of PDAG on the last Y site (P sends Y to -X), and only
    if there is no Y an explicit X is applied on ``sign_site``.
    """
    t = state.tableau
    plan: list[tuple] = []
    last_y = None
    for q in sites:
        p = _pauli(t, r, q)
        if p == 1:  # X
            plan.append(("H", q))
        elif p == 3:  # Y
            last_y = len(plan)
            plan += [("PDAG", q), ("H", q)]
    probe = StabilizerTableau._raw([t._x[r]], [t._z[r]], [t._ph[r]], t.n_photons, t.n_emitters)
    for op in plan:
        probe.apply(op)
    if probe.row(0).sign < 0:
        if last_y is not None:
            plan[last_y] = ("P", plan[last_y][1])
        else:
            plan.append(("X", sign_site))
    for op in plan:
        _gate(state, *op)


def _emitter_sites(t: StabilizerTableau, r: int) -> list[int]:
    return [t.n_photons + q for q in bits((t._x[r] | t._z[r]) >> t.n_photons)]


def _fold(state: SolverState, sites: Sequence[int]) -> None:
    """CNOTs sending ``Z_i Z_k ...`` on ``sites`` to ``Z_i``, ``i = sites[0]``."""
    for k in sites[1:]:
        _gate(state, "CNOT", k, sites[0])


def _clear_column(state: SolverState, pivot: int, q: int) -> None:
    """Remove ``Z_q`` from every live row other than ``pivot`` (which is ``Z_q``-led)."""
    t = state.tableau
    m = 1 << q
    for r in range(len(t)):
        if r == pivot or r in state.decoupled:
            continue
        if t._x[r] & m:
            raise SolverError("internal: generator anticommutes with a single-site Z")
        if t._z[r] & m:
            t.multiply_row(r, pivot)


def _emitter_z_row(state: SolverState, site: int) -> tuple[int, int]:
    """Bring the first emitter-only echelon row to ``+Z_i``; return ``(row, i)``."""
    t = state.tableau
    order = _refresh(state, site)
    candidates = [r for r in order if t.left_end_of(r) >= t.n_photons]
    if not candidates:
        raise SolverError("internal: no generator supported on emitters alone")
    g = candidates[0]
    sites = _emitter_sites(t, g)
    _diagonalize(state, g, sites, sites[0])
    _fold(state, sites)
    _clear_column(state, g, sites[0])
    return g, sites[0]


def _local_cost(x: int, z: int) -> int:
    """Single-qubit gates needed to send every site of a row to Z."""
    return (x & ~z).bit_count() + 2 * (x & z).bit_count()


def _pick_generator(t: StabilizerTableau, leading: list[int]) -> int:
    """Row to absorb: fewest emitters, then cheapest local Cliffords.

    With two leading rows their product (leading with the third Pauli) is also
    a candidate; if it wins, it replaces the X/Y-leading row in place.
    """
    emask = ~((1 << t.n_photons) - 1)

    def key(x, z, pos):
        return (((x | z) & emask).bit_count(), _local_cost(x, z), pos)

    best = min(leading, key=lambda r: key(t._x[r], t._z[r], leading.index(r)))
    if len(leading) == 2:
        a, b = leading
        x, z = t._x[a] ^ t._x[b], t._z[a] ^ t._z[b]
        if key(x, z, 2) < key(t._x[best], t._z[best], leading.index(best)):
            t.multiply_row(a, b)
            return a
    return best


def _shrink(t: StabilizerTableau, g: int, others: Sequence[int]) -> None:
    """Greedily multiply row ``g`` by ``others`` while its support shrinks."""
    improved = True
    while improved:
        improved = False
        for r in others:
            w = (t._x[g] | t._z[g]).bit_count()
            if ((t._x[g] ^ t._x[r]) | (t._z[g] ^ t._z[r])).bit_count() < w:
                t.multiply_row(g, r)
                improved = True


# -- primitives ---------------------------------------------------------------

def reverse_measurement(state: SolverState, j: int | None = None) -> int:
    """Time-reversed measurement before absorbing photon ``j`` (1-based).

    Requires ``h(j) < h(j-1)``. Returns the 1-based site of the emitter used.
    Raises ``AssertionError`` if the height function does not rise by exactly
    one on every site from ``j`` up to the emitter.
    """
    j = state.current_photon if j is None else j
    t = state.tableau
    s = j - 1
    order = _refresh(state, s)
    if any(t.left_end_of(r) == s for r in order):
        raise SolverError(f"h({j}) >= h({j - 1}); no time-reversed measurement needed")
    g, i = _emitter_z_row(state, s)
    t.apply_h(i)
    state.reversed_ops.append(("H", i))
    _refresh(state, s)
    before = state.heights()
    # the H_i just recorded and the CNOT below form one UNMEASURE primitive
    state.reversed_ops.pop()
    state.reversed_ops.append(("UNMEASURE", i, s))
    t.apply_cnot(i, s)
    _refresh(state, s)
    after = state.heights()
    for x in range(j, i + 1):
        assert after[x] == before[x] + 1, (j, i + 1, x, before, after)
    assert after[j - 1] == before[j - 1], (j, before, after)
    state.events.append(MeasurementEvent(j, i + 1, tuple(before), tuple(after)))
    return i + 1


def absorb_photon(state: SolverState, j: int | None = None, row: int | None = None) -> None:
    """Disentangle photon ``j`` into an emitter, leaving it stabilized by ``+Z_j``.

    ``row`` overrides the choice of the generator that is turned into ``Z_j``;
    by default the one with the smallest emitter support among those whose
    left end is ``j`` (ties go to the lower row index).
    """
    j = state.current_photon if j is None else j
    t = state.tableau
    s = j - 1
    order = _refresh(state, s)
    leading = [r for r in order if t.left_end_of(r) == s]
    if not leading:
        raise SolverError(f"no generator starts at site {j}; measurement needed first")
    if row is None:
        g = _pick_generator(t, leading)
    elif row in leading:
        g = row
    else:
        raise SolverError(f"row {row} does not start at site {j}")
    if row is None:
        _shrink(t, g, [r for r in order if t.left_end_of(r) >= t.n_photons])
    stray = ((t._x[g] | t._z[g]) >> j) & ((1 << (t.n_photons - j)) - 1)
    if stray:
        raise SolverError("internal: generator touches an already absorbed photon")
    sites = _emitter_sites(t, g)
    _diagonalize(state, g, [s, *sites], s)
    _fold(state, sites)
    if sites:
        i = sites[0]
        state.reversed_ops.append(("ABSORB", i, s))
        t.apply_cnot(i, s)
        _clear_column(state, g, s)
    else:
        # photon already decoupled: emit it from an emitter sitting in |0>
        _clear_column(state, g, s)
        e, i = _emitter_z_row(state, s)
        state.reversed_ops.append(("ABSORB", i, s))
        t.apply_cnot(i, s)
        t.multiply_row(g, e)
    if (t._x[g], t._z[g], t._ph[g] % 4) != (0, 1 << s, 0):
        raise SolverError("internal: absorbed photon is not in |0>")
    state.decoupled.add(g)


def disentangle_emitters(state: SolverState) -> None:
    """Bring the emitters, and hence the whole register, to ``|0...0>``."""
    t = state.tableau
    n_p = t.n_photons
    remaining = [r for r in range(len(t)) if r not in state.decoupled]
    if len(remaining) != t.n_emitters:
        raise SolverError("internal: photons left entangled")
    for c in range(n_p, t.n):
        m = 1 << c
        cands = [r for r in remaining if (t._x[r] | t._z[r]) & m]
        g = min(cands, key=lambda r: ((t._x[r] | t._z[r]).bit_count(), r))
        _shrink(t, g, [r for r in remaining if not (t._x[r] | t._z[r]) & m])
        sites = _emitter_sites(t, g)
        assert sites[0] == c
        _diagonalize(state, g, sites, c)
        _fold(state, sites)
        _clear_column(state, g, c)
        remaining.remove(g)
        state.decoupled.add(g)
    for r in range(len(t)):
        x, z, ph = t._x[r], t._z[r], t._ph[r] % 4
        assert x == 0 and ph == 0 and z.bit_count() == 1, t.row(r)


# -- driver -------------------------------------------------------------------

_INVERSE = {"H": "H", "P": "PDAG", "PDAG": "P", "X": "X", "Z": "Z"}


def _forward(ops: Sequence[tuple], n_photons: int) -> list[Instruction]:
    def qubit(q: int) -> ir.Qubit:
        return ir.photon(q + 1) if q < n_photons else ir.emitter(q - n_photons + 1)

    out: list[Instruction] = []
    cbit = 0
    for op in reversed(ops):
        name = op[0]
        if name in _INVERSE:
            out.append(Instruction(_INVERSE[name], (qubit(op[1]),)))
        elif name == "CNOT":
            out.append(Instruction("CNOT", (qubit(op[1]), qubit(op[2]))))
        elif name == "ABSORB":
            out.append(Instruction("EMIT", (qubit(op[1]), qubit(op[2]))))
        elif name == "UNMEASURE":
            e, p = qubit(op[1]), qubit(op[2])
            out.append(Instruction("MEAS", (e,), cbit))
            out.append(Instruction("CX?", (p,), cbit))
            out.append(Instruction("CX?", (e,), cbit))
            cbit += 1
        else:  # pragma: no cover
            raise SolverError(f"unknown primitive {name}")
    return out


def _check_target(target: StabilizerTableau) -> None:
    if target.n_photons < 1:
        raise SolverError("empty target")
    if target.n_emitters:
        raise SolverError("target must be a photon-only tableau")
    if target.n_photons > 1:
        for site in range(1, target.n_photons + 1):
            if target.is_photon_decoupled(site):
                raise SolverError(f"target is disconnected: photon {site} is unentangled")


def run(target: StabilizerTableau, n_emitters: int | None = None) -> SolverState:
    """Run the time-reversed loop and return the final state (ops recorded)."""
    _check_target(target)
    state = initial_state(target, n_emitters)
    t = state.tableau
    for j in range(t.n_photons, 0, -1):
        state.current_photon = j
        order = _refresh(state, j - 1)
        if not any(t.left_end_of(r) == j - 1 for r in order):
            reverse_measurement(state, j)
        absorb_photon(state, j)
    state.current_photon = 0
    disentangle_emitters(state)
    return state


def solve(target: StabilizerTableau, ordering: Sequence[int] | None = None, *,
          n_emitters: int | None = None, simplify: bool = True) -> GenerationCircuit:
    """Forward generation circuit for ``target`` (qubits in emission order).

    ``ordering`` only labels the photons for output; the target must already
    list its qubits in emission order.
    """
    state = run(target, n_emitters)
    instructions = _forward(state.reversed_ops, target.n_photons)
    if simplify:
        instructions = cancel_inverse_pairs(instructions)
    circuit = GenerationCircuit(target.n_photons, state.n_emitters, instructions,
                                check_ordering(ordering, target.n_photons))
    circuit.metadata = {"h_max": height(target).h_max,
                        "time_reversed_measurements": len(state.events)}
    return circuit


def solve_graph(graph: Graph, ordering: Sequence[int] | None = None, *,
                split: bool = False) -> GenerationCircuit:
    """Solve the graph state of ``graph`` emitted in ``ordering``.

    Disconnected graphs raise :class:`SolverError` unless ``split`` is set, in
    which case each component is solved on its own emitters and the circuits
    are interleaved so photons still leave in ``ordering``.
    """
    ordering = check_ordering(ordering, graph.n_vertices)
    if graph.n_vertices == 0:
        raise SolverError("empty target")
    comps = graph.components()
    if len(comps) == 1:
        return solve(graph_stabilizers(graph, ordering), ordering)
    if not split:
        raise SolverError(f"graph has {len(comps)} connected components (use split)")
    parts = []
    for comp in comps:
        members = set(comp)
        sub_order = [v for v in ordering if v in members]
        sub = graph.subgraph(sub_order)
        parts.append((sub_order, solve(graph_stabilizers(sub), None)))
    return _merge(parts, ordering)


def _merge(parts, ordering) -> GenerationCircuit:
    position = {v: k + 1 for k, v in enumerate(ordering)}
    owner = {}
    emitter_offset = []
    total_e = 0
    for k, (sub_order, circ) in enumerate(parts):
        for v in sub_order:
            owner[v] = k
        emitter_offset.append(total_e)
        total_e += circ.n_emitters
    cursors = [0] * len(parts)
    cbit_maps: list[dict[int, int]] = [{} for _ in parts]
    out: list[Instruction] = []
    next_cbit = 0

    def relabel(k: int, ins: Instruction) -> Instruction:
        nonlocal next_cbit
        sub_order = parts[k][0]
        qs = tuple(ir.photon(position[sub_order[q.index - 1]]) if q.role == "p"
                   else ir.emitter(q.index + emitter_offset[k]) for q in ins.qubits)
        cbit = ins.cbit
        if ins.op == "MEAS":
            cbit_maps[k][cbit] = next_cbit
            next_cbit += 1
        if cbit is not None:
            cbit = cbit_maps[k][cbit]
        return Instruction(ins.op, qs, cbit)

    def pull(k: int, until_emit: bool) -> None:
        instrs = parts[k][1].instructions
        while cursors[k] < len(instrs):
            ins = instrs[cursors[k]]
            cursors[k] += 1
            out.append(relabel(k, ins))
            if until_emit and ins.op == "EMIT":
                return

    for v in ordering:
        pull(owner[v], True)
    for k in range(len(parts)):
        pull(k, False)
    circuit = GenerationCircuit(len(ordering), total_e, out, tuple(ordering))
    circuit.metadata = {"components": len(parts)}
    return circuit
