"""Minimal-emitter synthesis of photonic stabilizer-state generation circuits."""

from .circuit import CircuitError, GenerationCircuit, Instruction, parse, serialize
from .graphs import Graph, GraphError, builtin, builtin_graph, erdos_renyi, graph_stabilizers, rank_height
from .ordering import best_ordering, heuristics, local_search, score
from .pauli import PauliRow, StabilizerTableau, TableauError, height, parse_stabilizers, to_echelon
from .solver import SolverError, num_emitters, solve, solve_graph
from .verify import VerificationReport, simulate, states_equal, verify

__version__ = "0.1.0"

__all__ = [
    "CircuitError", "GenerationCircuit", "Instruction", "parse", "serialize",
    "Graph", "GraphError", "builtin", "builtin_graph", "erdos_renyi", "graph_stabilizers",
    "rank_height", "best_ordering", "heuristics", "local_search", "score",
    "PauliRow", "StabilizerTableau", "TableauError", "height", "parse_stabilizers",
    "to_echelon", "SolverError", "num_emitters", "solve", "solve_graph",
    "VerificationReport", "simulate", "states_equal", "verify",
]
