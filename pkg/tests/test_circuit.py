import json

import numpy as np
import pytest

from emitsynth.circuit import (CircuitError, GenerationCircuit, Instruction, Qubit,
                               cancel_inverse_pairs, from_dict, parse, serialize, to_dict)
from emitsynth.graphs import Graph, builtin_graph, erdos_renyi
from emitsynth.solver import solve_graph

FIG1A = Graph(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])

# Hand-written circuit with the reduced-repeater tallies (structural fixture:
# four emitter CNOTs, one measurement).
REDUCED_COUNTS_TEXT = """\
photons 4 emitters 2 ordering 1 2 3 4
H e1
CNOT e1 e2
EMIT e1 p1
H p1
CNOT e2 e1
EMIT e2 p2
CNOT e1 e2
EMIT e1 p3
CNOT e2 e1
H e2
MEAS e2 -> c0
CZ? c0 e1
CX? c0 e2
EMIT e1 p4
H p4
"""


def e(k):
    return Qubit("e", k)


def p(k):
    return Qubit("p", k)


def fixture_circuits():
    out = [solve_graph(FIG1A), solve_graph(FIG1A, (3, 2, 1, 4))]
    for fam, kw in (("rgs", {"m": 6}), ("rgs_reduced", {}), ("line", {"n": 5}),
                    ("star", {"n": 6})):
        g, o = builtin_graph(fam, **kw)
        out.append(solve_graph(g, o))
    out += [solve_graph(erdos_renyi(10, 0.5, s)) for s in range(5)]
    return out


def test_round_trip_text_and_dict():
    for c in fixture_circuits():
        text = serialize(c)
        back = parse(text)
        assert serialize(back) == text
        assert back.instructions == c.instructions and back.ordering == c.ordering
        d = to_dict(c)
        again = from_dict(json.loads(json.dumps(d)))
        assert again.instructions == c.instructions
        assert d["counts"]["total_gates"] == c.counts.total_gates


def test_text_format_lines():
    c = solve_graph(FIG1A)
    lines = serialize(c).splitlines()
    assert lines[0] == "photons 4 emitters 2 ordering 1 2 3 4"
    assert "MEAS e2 -> c0" in lines and "CX? c0 p3" in lines
    assert all(ln.split()[0] in {"H", "P", "PDAG", "X", "Z", "CNOT", "EMIT", "MEAS", "CX?", "CZ?"}
               for ln in lines[1:])


def test_swapped_worked_example_is_short():
    c = solve_graph(FIG1A, (3, 2, 1, 4))
    body = serialize(c).splitlines()[1:]
    unconditioned = [ln for ln in body if not ln.startswith(("CX?", "CZ?"))]
    assert len(unconditioned) <= 15
    assert c.counts.measurements == 1 and c.counts.emitter_cnots == 0


def test_counts_fixtures():
    c = parse(REDUCED_COUNTS_TEXT)
    assert (c.counts.emitter_cnots, c.counts.measurements) == (4, 1)
    assert c.counts.emissions == 4 and c.counts.conditional_paulis == 2
    g, o = builtin_graph("rgs", m=6)
    rgs = solve_graph(g, o)
    assert (rgs.counts.emitter_cnots, rgs.counts.measurements) == (5, 5)
    empty = GenerationCircuit(0, 0)
    assert tuple(empty.counts) == (0, 0, 0, 0, 0) and empty.counts.total_gates == 0
    assert serialize(empty) == "photons 0 emitters 0 ordering\n"
    assert parse(serialize(empty)).instructions == []


def test_counts_recomputable_and_emissions_equal_photons():
    for c in fixture_circuits():
        n = c.counts
        assert n.emissions == c.n_photons
        assert sum(1 for i in c.instructions if i.op == "CNOT") == n.emitter_cnots
        assert n.total_gates == n.single_qubit_gates + n.emitter_cnots + n.emissions


def test_counts_stable_under_commuting_reorder():
    c = parse(REDUCED_COUNTS_TEXT)
    ins = list(c.instructions)
    # "H p1" commutes with everything after the first emission up to "H p4"
    moved = ins[:3] + ins[4:14] + [ins[3]] + ins[14:]
    c2 = GenerationCircuit(4, 2, moved)
    c2.validate()
    assert c2.counts == c.counts


@pytest.mark.parametrize("body, needle", [
    ("EMIT p1 e1", "EMIT takes an emitter"),
    ("H p1\nEMIT e1 p1", "before emission"),
    ("EMIT e1 p1\nEMIT e1 p1", "emitted twice"),
    ("EMIT e1 p1\nCNOT e1 p1", "two distinct emitters"),
    ("EMIT e1 p1\nCNOT e1 e1", "two distinct emitters"),
    ("EMIT e1 p1\nMEAS p1 -> c0", "only emitters"),
    ("EMIT e1 p1\nCX? c0 p1", "not yet measured"),
    ("EMIT e1 p1\nMEAS e1 -> c1", "in order"),
    ("EMIT e3 p1", "out of range"),
])
def test_validation_errors(body, needle):
    text = "photons 1 emitters 1 ordering 1\n" + body + "\n"
    with pytest.raises(CircuitError, match=needle):
        parse(text)


def test_missing_emission_and_bad_ordering():
    with pytest.raises(CircuitError, match="never emitted"):
        parse("photons 2 emitters 1 ordering 1 2\nEMIT e1 p1\n")
    with pytest.raises(CircuitError, match="permutation"):
        GenerationCircuit(2, 1, [], (1, 1)).validate()
    bad = GenerationCircuit(1, 1, [Instruction("EMIT", (p(1), e(1)))])
    with pytest.raises(CircuitError):
        serialize(bad)
    with pytest.raises(CircuitError):
        to_dict(bad)


@pytest.mark.parametrize("text, line", [
    ("photons 1 emitters 1 ordering 1\nEMIT e1 p1\nFOO e1\n", 3),
    ("photons 1 emitters 1 ordering 1\n\n# c\nMEAS e1 c0\n", 4),
    ("photons 1 emitters 1 ordering 1\nH e01x\n", 2),
    ("photons x emitters 1 ordering 1\n", 1),
    ("photons 1 emitters 1 ordering 1\nCX? 0 p1\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitError, match=f"line {line}"):
        parse(text)


def test_parse_empty_and_schema():
    with pytest.raises(CircuitError, match="empty"):
        parse("\n# nothing\n")
    d = to_dict(solve_graph(FIG1A))
    with pytest.raises(CircuitError, match="schema"):
        from_dict({**d, "schema": 2})
    with pytest.raises(CircuitError, match="malformed"):
        from_dict({"schema": 1, "photons": 1})


def test_cancel_inverse_pairs():
    ins = [Instruction("H", (e(1),)), Instruction("H", (e(1),)),
           Instruction("P", (e(2),)), Instruction("PDAG", (e(2),)),
           Instruction("CNOT", (e(1), e(2))), Instruction("H", (e(2),)),
           Instruction("CNOT", (e(1), e(2))),
           Instruction("CNOT", (e(2), e(1))), Instruction("CNOT", (e(2), e(1)))]
    out = cancel_inverse_pairs(ins)
    assert out == [Instruction("CNOT", (e(1), e(2))), Instruction("H", (e(2),)),
                   Instruction("CNOT", (e(1), e(2)))]
    # nested pairs collapse completely
    nest = [Instruction("P", (e(1),)), Instruction("H", (e(1),)), Instruction("H", (e(1),)),
            Instruction("PDAG", (e(1),))]
    assert cancel_inverse_pairs(nest) == []
    # measurements are never cancelled
    meas = [Instruction("MEAS", (e(1),), 0), Instruction("MEAS", (e(1),), 1)]
    assert cancel_inverse_pairs(meas) == meas


def test_cancel_inverse_pairs_preserves_unitary():
    from dense import gate_matrix
    rng = np.random.default_rng(2)
    names = ("H", "P", "PDAG", "X", "Z", "CNOT")
    for _ in range(50):
        ins = []
        for _ in range(12):
            op = names[int(rng.integers(len(names)))]
            if op == "CNOT":
                a, b = (int(v) + 1 for v in rng.choice(3, 2, replace=False))
                ins.append(Instruction(op, (e(a), e(b))))
            else:
                ins.append(Instruction(op, (e(int(rng.integers(3)) + 1),)))
        out = cancel_inverse_pairs(ins)

        def unitary(seq):
            u = np.eye(8, dtype=complex)
            for i in seq:
                gate = (i.op, *(q.index - 1 for q in i.qubits))
                u = gate_matrix(gate, 3) @ u
            return u
        assert np.allclose(unitary(ins), unitary(out))
        assert len(out) <= len(ins)


def test_qubit_parse():
    assert Qubit.parse("e12") == e(12)
    for bad in ("e0", "q1", "p", "p-1"):
        with pytest.raises(CircuitError):
            Qubit.parse(bad)
    assert str(Instruction("CZ?", (e(1),), 3)) == "CZ? c3 e1"
    assert [str(q) for q in (p(1), e(2))] == ["p1", "e2"]
