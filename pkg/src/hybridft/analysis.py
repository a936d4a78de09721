"""Per-gate analysis and reproduction of the code comparison table."""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import TABLE_GATES, Gate, gate_from_name
from .concat import (
    NOT_APPLICABLE,
    PREDICTED,
    ConcatSpec,
    build_concat,
    lift_circuit,
    predict_effective_distance,
    preset,
)
from .faults import DEFAULT_BUDGET, LOWER_BOUND, SearchResult, effective_distance_search
from .synth import logical_gate_on

__all__ = ["TABLE_GATE_ORDER", "EXPECTED_TABLE", "GateAnalysis", "analyze_gate", "table_rows", "VERIFIED", "MISMATCH",
           "default_tmax", "table_ok", "any_lower_bound"]

VERIFIED = "VERIFIED"
MISMATCH = "MISMATCH"
TABLE_GATE_ORDER = ("H", "K", "T", "S", "CZ", "CCZ")

# Expected comparison table: qubits, then H, K, T, S, CZ, CCZ, worst case.
# None marks a gate whose permutation would mix blocks of different codes.
EXPECTED_TABLE = {
    "c25": (25, 5, 5, 3, 5, 5, 3, 3),
    "c49": (49, 9, 9, 3, 9, 9, 3, 3),
    "c23": (23, None, 5, 3, 3, 3, 3, 3),
    "c31": (31, None, 9, 3, 3, 3, 3, 3),
    "c35": (35, 9, 9, 3, 3, 3, 3, 3),
}


@dataclass
class GateAnalysis:
    spec: ConcatSpec
    gate: Gate
    predicted: object
    search: SearchResult | None = None

    @property
    def applicable(self) -> bool:
        return self.predicted != NOT_APPLICABLE

    @property
    def verdict(self) -> str:
        """VERIFIED, LOWER_BOUND, MISMATCH, PREDICTED (not searched) or NOT_APPLICABLE."""
        if not self.applicable:
            return NOT_APPLICABLE
        s = self.search
        if s is None:
            return PREDICTED
        if s.witness is not None and 2 * len(s.witness) - 1 < self.predicted:
            return MISMATCH
        if 2 * s.t_verified + 1 > self.predicted:
            return MISMATCH
        if s.exact and s.effective_distance == self.predicted:
            return VERIFIED
        return LOWER_BOUND

    def to_dict(self, timing: bool = False) -> dict:
        d = {"gate": _gate_name(self.gate), "predicted": self.predicted, "verdict": self.verdict}
        if self.search is not None:
            d["search"] = self.search.to_dict(timing)
        return d


def _gate_name(g: Gate) -> str:
    for name, tg in TABLE_GATES.items():
        if tg == g:
            return name
    return str(g)


def default_tmax(predicted: int) -> int:
    """Search depth that pins an effective distance d = 2t+1 with a size t+1 witness."""
    return (predicted + 1) // 2


def analyze_gate(spec: ConcatSpec, gate: Gate | str, t_max: int | None = None, budget: int = DEFAULT_BUDGET,
                 verify: bool = True, interleaved_ec: bool = False, idle: bool = False,
                 policy="switch", gadget_slots: int = 1) -> GateAnalysis:
    g = gate_from_name(gate) if isinstance(gate, str) else gate
    pred = predict_effective_distance(spec, g)
    out = GateAnalysis(spec, g, pred)
    if pred == NOT_APPLICABLE or not verify:
        return out
    cc = build_concat(spec)
    lifted = lift_circuit(spec, logical_gate_on(spec.code, g), policy)
    depth = default_tmax(pred) if t_max is None else t_max
    out.search = effective_distance_search(lifted, cc, depth, budget, interleaved_ec, idle, gadget_slots)
    return out


def table_rows(verify: bool = True, budget: int = 10**6, **kw) -> list[dict]:
    rows = []
    for name, expected in EXPECTED_TABLE.items():
        spec = preset(name)
        cc = build_concat(spec)
        cells = []
        for gname, want in zip(TABLE_GATE_ORDER, expected[1:7]):
            a = analyze_gate(spec, gname, budget=budget, verify=verify, **kw)
            got = None if a.predicted == NOT_APPLICABLE else a.predicted
            cell = a.to_dict()
            cell["expected"] = "-" if want is None else want
            cell["match"] = got == want
            cells.append(cell)
        worst = min(c["predicted"] for c in cells if c["predicted"] != NOT_APPLICABLE)
        rows.append({
            "code": name,
            "root": spec.root,
            "case": cc.case_tag,
            "qubits": cc.n,
            "qubits_match": cc.n == expected[0],
            "cells": cells,
            "worst_case": worst,
            "worst_case_match": worst == expected[7],
        })
    return rows


def table_ok(rows: list[dict]) -> bool:
    return all(r["qubits_match"] and r["worst_case_match"] and all(c["match"] for c in r["cells"]) for r in rows)


def any_lower_bound(rows: list[dict]) -> bool:
    return any(c["verdict"] == LOWER_BOUND for r in rows for c in r["cells"])
