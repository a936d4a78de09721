"""Verification workbench for hybrid concatenated codes.

Builds the five-qubit, Steane and Reed-Muller [[15,1,3]] codes and their
non-uniform concatenations, synthesizes logical C^k Z(theta) gates that use a
single physical non-Clifford gate, and checks distances and effective
distances by exhaustive search, fault enumeration and dense simulation.
"""

from ._accel import backend, set_backend, set_threads
from .circuit import Circuit, Gate, TABLE_GATES, ckz, gadget, gate_from_name, named, permutation
from .codes import StabilizerCode, code_distance, make_code, min_weight_logical_rep, validate_code
from .concat import (
    NOT_APPLICABLE,
    ConcatCode,
    ConcatSpec,
    build_concat,
    lift_circuit,
    overall_distance,
    predict_effective_distance,
    preset,
)
from .decoder import decode_hierarchical
from .faults import (
    FaultLocation,
    FaultSet,
    Verdict,
    check_fault_set,
    effective_distance_search,
    enumerate_fault_locations,
    propagate_faults,
)
from .pauli import CliffordMap, PauliOperator, clifford_conjugate, pauli_commutes, pauli_multiply
from .statevec import DenseState, encode_logical, verify_logical_action
from .synth import (
    check_transversal,
    find_transversal_permutation,
    logical_gate_on,
    partition,
    synth_ckz,
    transversal_circuit,
)

__version__ = "0.1.0"

__all__ = [
    "backend", "set_backend", "set_threads",
    "Circuit", "Gate", "TABLE_GATES", "ckz", "gadget", "gate_from_name", "named", "permutation",
    "StabilizerCode", "code_distance", "make_code", "min_weight_logical_rep", "validate_code",
    "NOT_APPLICABLE", "ConcatCode", "ConcatSpec", "build_concat", "lift_circuit", "overall_distance",
    "predict_effective_distance", "preset",
    "decode_hierarchical",
    "FaultLocation", "FaultSet", "Verdict", "check_fault_set", "effective_distance_search",
    "enumerate_fault_locations", "propagate_faults",
    "CliffordMap", "PauliOperator", "clifford_conjugate", "pauli_commutes", "pauli_multiply",
    "DenseState", "encode_logical", "verify_logical_action",
    "check_transversal", "find_transversal_permutation", "logical_gate_on", "partition", "synth_ckz",
    "transversal_circuit",
]
