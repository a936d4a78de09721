"""Command-line entry point: ``hybridft <command> ...``.

Exit codes: 0 pass, 1 mismatch, 2 usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import _accel
from .analysis import (
    EXPECTED_TABLE,
    MISMATCH,
    TABLE_GATE_ORDER,
    analyze_gate,
    any_lower_bound,
    table_ok,
    table_rows,
)
from .circuit import Circuit, gate_from_name, parse_theta
from .codes import CODE_NAMES, UnknownCodeError, code_distance, make_code, validate_code
from .concat import (
    EXACT,
    NOT_APPLICABLE,
    PRESETS,
    ConcatSpec,
    LiftError,
    MalformedSpecError,
    build_concat,
    lift_circuit,
    overall_distance,
    preset,
)
from .faults import DEFAULT_BUDGET, LOWER_BOUND
from .statevec import MAX_DENSE_QUBITS, verify_logical_action
from .synth import logical_gate_on, partition, synth_ckz

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS, metavar="N", help="cap worker threads")
    p.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                   help="include wall time in the report (breaks byte-for-byte reproducibility)")
    return p


def _search_flags(p: argparse.ArgumentParser, budget: int) -> None:
    p.add_argument("--budget", type=float, default=budget, metavar="N", help="branch-decode budget")
    p.add_argument("--interleaved-ec", action="store_true", help="ideal error correction between logical gates")
    p.add_argument("--idle-faults", action="store_true", help="add input and idle-qubit fault locations")
    p.add_argument("--gadget-slots", type=int, default=1, metavar="N", help="internal fault slots per gadget")
    p.add_argument("--policy", default="switch", choices=("switch", "msd", "pft"), help="gadget for S1 gates")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hybridft", parents=[common],
                                     description="Verification workbench for hybrid concatenated codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    codes = sub.add_parser("codes", parents=[common], help="list, validate or measure codes")
    codes.add_argument("action", choices=("list", "validate", "distance"))
    codes.add_argument("name", nargs="?", help="base code or preset")

    synth = sub.add_parser("synth", parents=[common], help="C^k Z(theta) with one physical non-Clifford gate")
    synth.add_argument("codes", nargs="+", help="one code per block (repeated to k+1 if a single name is given)")
    synth.add_argument("--k", type=int, default=0)
    synth.add_argument("--theta", default="pi/4", help="exact multiple of pi, e.g. pi/4")
    synth.add_argument("--out", type=Path, help="write the circuit text here")

    analyze = sub.add_parser("analyze", parents=[common], help="effective distance of one gate on a code")
    analyze.add_argument("spec", help="preset name or JSON spec file")
    analyze.add_argument("--gate", required=True)
    analyze.add_argument("--tmax", type=int, help="largest fault-set size to enumerate")
    analyze.add_argument("--predict-only", action="store_true")
    _search_flags(analyze, DEFAULT_BUDGET)

    table = sub.add_parser("table1", parents=[common], help="reproduce the code comparison table")
    table.add_argument("--no-verify", action="store_true", help="skip fault enumeration")
    _search_flags(table, 10**6)

    lift = sub.add_parser("lift", parents=[common], help="physical circuit for a logical gate or circuit")
    lift.add_argument("spec", help="preset name or JSON spec file")
    src = lift.add_mutually_exclusive_group(required=True)
    src.add_argument("--gate")
    src.add_argument("--circuit", type=Path)
    lift.add_argument("--policy", default="switch", choices=("switch", "msd", "pft"))
    lift.add_argument("--out", type=Path)

    part = sub.add_parser("partition", parents=[common], help="B1/B2 and S1/S2 partitions of a circuit")
    part.add_argument("code", help="code the circuit acts on (for --gate)")
    psrc = part.add_mutually_exclusive_group(required=True)
    psrc.add_argument("--gate")
    psrc.add_argument("--circuit", type=Path)
    part.add_argument("--inner", default="steane", help="inner code deciding S1 vs S2")
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load_spec(text: str) -> ConcatSpec:
    if text in PRESETS:
        return preset(text)
    path = Path(text)
    if path.is_file():
        return ConcatSpec.from_json(path.read_text())
    if text in CODE_NAMES:
        return ConcatSpec.leaf(text)
    raise UsageError(f"{text!r} is neither a preset ({', '.join(PRESETS)}), a code nor a spec file")


def _code(name: str):
    try:
        return make_code(name)
    except UnknownCodeError as e:
        raise UsageError(str(e.args[0]) if e.args else str(e)) from None


def _gate(text: str):
    try:
        return gate_from_name(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _cell(value, tier: str) -> dict:
    return {"value": value, "tier": tier}


# ---------------------------------------------------------------------------
# commands; each returns (report, human text, exit code)
# ---------------------------------------------------------------------------

def cmd_codes(args) -> tuple[dict, str, int]:
    if args.action == "list":
        rows = [{"name": n, "kind": "code", "qubits": make_code(n).n} for n in CODE_NAMES]
        rows += [{"name": p, "kind": "preset", "qubits": build_concat(preset(p)).n} for p in PRESETS]
        text = "\n".join(f"{r['name']:<11} {r['kind']:<7} {r['qubits']:>3} qubits" for r in rows)
        return {"results": rows}, text, EXIT_OK
    if not args.name:
        raise UsageError(f"codes {args.action} needs a name")
    if args.action == "validate":
        if args.name in PRESETS:
            code = build_concat(preset(args.name)).flat
        else:
            code = _code(args.name)
        rep = validate_code(code)
        failed = {f.split(":")[0] for f in rep.failures}
        checks = [{"check": k, "ok": k not in failed} for k in rep.checks]
        text = "\n".join(f"{'ok  ' if c['ok'] else 'FAIL'} {c['check']}" for c in checks)
        return {"results": {"code": args.name, "ok": rep.ok, "checks": checks}}, text, EXIT_OK if rep.ok else EXIT_MISMATCH
    if args.name in PRESETS:
        od = overall_distance(build_concat(preset(args.name)))
        res = {"code": args.name, "distance": _cell(od.value, od.tier),
               "components": {k: _cell(v, EXACT) for k, v in od.components.items()}}
        comp = ", ".join(f"{k} {v} {EXACT}" for k, v in od.components.items())
        return {"results": res}, f"{args.name}: distance {od.value} {od.tier} (components: {comp})", EXIT_OK
    d = code_distance(_code(args.name))
    return {"results": {"code": args.name, "distance": _cell(d, EXACT)}}, f"{args.name}: distance {d} {EXACT}", EXIT_OK


def cmd_synth(args) -> tuple[dict, str, int]:
    names = args.codes if len(args.codes) > 1 else args.codes * (args.k + 1)
    if len(names) != args.k + 1:
        raise UsageError(f"C^{args.k}Z needs {args.k + 1} blocks, got {len(names)}")
    try:
        theta = parse_theta(args.theta)
    except ValueError as e:
        raise UsageError(str(e)) from None
    blocks = [_code(n) for n in names]
    circ = synth_ckz(blocks, args.k, theta)
    coupled = []
    offset = 0
    for c in blocks:
        coupled.append([f"q{q - offset + 1}" for q in sorted(circ.coupled_qubits()) if offset <= q < offset + c.n])
        offset += c.n
    res = {
        "blocks": names,
        "k": args.k,
        "theta": args.theta,
        "gates": len(circ),
        "non_clifford_locations": [f"g{i + 1}" for i in circ.non_clifford_locations()],
        "coupled": coupled,
        "circuit": circ.to_text().splitlines(),
    }
    if circ.n <= MAX_DENSE_QUBITS:
        from .circuit import ckz

        res["logical_action_deficit"] = verify_logical_action(blocks, circ, ckz(args.k, theta))
    if args.out:
        args.out.write_text(circ.to_text())
    text = circ.to_text() + "\n" + "\n".join(
        [f"non-Clifford locations: {', '.join(res['non_clifford_locations']) or 'none'}"]
        + [f"coupled set of block {i + 1}: {{{', '.join(c)}}}" for i, c in enumerate(coupled)]
        + ([f"logical action deficit: {res['logical_action_deficit']:.2e}"] if "logical_action_deficit" in res else []))
    return {"results": res}, text, EXIT_OK


def _search_kwargs(args) -> dict:
    return dict(budget=int(args.budget), interleaved_ec=args.interleaved_ec, idle=args.idle_faults,
                policy=args.policy, gadget_slots=args.gadget_slots)


def cmd_analyze(args) -> tuple[dict, str, int]:
    spec = _load_spec(args.spec)
    gate = _gate(args.gate)
    a = analyze_gate(spec, gate, args.tmax, verify=not args.predict_only, **_search_kwargs(args))
    timing = getattr(args, "timing", False)
    res = {"spec": spec.label, "qubits": build_concat(spec).n, **a.to_dict(timing)}
    lines = [f"{spec.label} {args.gate}: predicted {a.predicted}"]
    code = EXIT_OK
    if a.search is not None:
        s = a.search
        lines.append(f"verified t = {s.t_verified} ({s.status}); effective distance "
                     f"{'=' if s.exact else '>='} {s.effective_distance}; {s.branch_decodes} branch decodes")
        if s.witness is not None:
            lines.append("witness: " + "; ".join(f"{w['at']} {w['pauli']} on {','.join(w['qubits'])}"
                                                 for w in s.witness.render()))
        lines.append(f"verdict: {a.verdict}")
        if a.verdict == MISMATCH:
            code = EXIT_MISMATCH
        elif s.status == LOWER_BOUND:
            code = EXIT_BUDGET
    return {"results": res}, "\n".join(lines), code


def cmd_table1(args) -> tuple[dict, str, int]:
    kw = _search_kwargs(args)
    budget = kw.pop("budget")
    rows = table_rows(verify=not args.no_verify, budget=budget, **kw)
    header = f"{'code':<5} {'root':<10} {'case':<8} {'qubits':>6} " + " ".join(f"{g:>9}" for g in TABLE_GATE_ORDER) + "  worst"
    lines = [header]
    for r in rows:
        cells = []
        for c in r["cells"]:
            v = "-" if c["predicted"] == NOT_APPLICABLE else str(c["predicted"])
            mark = {"VERIFIED": "v", "LOWER_BOUND": ">", "MISMATCH": "!", "PREDICTED": "p"}.get(c["verdict"], "")
            cells.append(f"{v + mark:>9}" if c["match"] else f"{v + mark + '*':>9}")
        lines.append(f"{r['code']:<5} {r['root']:<10} {r['case']:<8} {r['qubits']:>6} " + " ".join(cells)
                     + f"  {r['worst_case']:>5}")
    lines.append("v: verified exactly by fault enumeration, >: verified up to the budget, p: predicted only, "
                 "*: differs from the expected table")
    ok = table_ok(rows) and not any(c["verdict"] == MISMATCH for r in rows for c in r["cells"])
    lines.append("all cells match the expected table" if ok else "MISMATCH against the expected table")
    res = {"rows": rows, "expected": {k: list(v) for k, v in EXPECTED_TABLE.items()}, "match": ok,
           "lower_bounds": any_lower_bound(rows)}
    return {"results": res}, "\n".join(lines), EXIT_OK if ok else EXIT_MISMATCH


def _read_circuit(path: Path) -> Circuit:
    try:
        return Circuit.from_text(path.read_text())
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read circuit {path}: {e}") from None


def cmd_lift(args) -> tuple[dict, str, int]:
    spec = _load_spec(args.spec)
    level1 = logical_gate_on(spec.code, _gate(args.gate)) if args.gate else _read_circuit(args.circuit)
    try:
        phys = lift_circuit(spec, level1, args.policy)
    except LiftError as e:
        raise UsageError(str(e)) from None
    counts: dict[str, int] = {}
    for op in phys.ops:
        key = str(op.gate) if op.gate.name == "GADGET" else op.gate.name
        counts[key] = counts.get(key, 0) + 1
    if args.out:
        args.out.write_text(phys.to_text())
    res = {"spec": spec.label, "qubits": phys.n, "gates": len(phys), "counts": dict(sorted(counts.items())),
           "circuit": phys.to_text().splitlines()}
    text = phys.to_text() + "\n" + ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
    return {"results": res}, text, EXIT_OK


def cmd_partition(args) -> tuple[dict, str, int]:
    inner = _code(args.inner)
    if args.gate:
        circ = logical_gate_on(_code(args.code), _gate(args.gate))
    else:
        circ = _read_circuit(args.circuit)
    r = partition(circ, inner).render()
    text = "\n".join(f"{k}: {{{', '.join(v)}}}" for k, v in r.items())
    return {"results": r}, text, EXIT_OK


COMMANDS = {
    "codes": cmd_codes,
    "synth": cmd_synth,
    "analyze": cmd_analyze,
    "table1": cmd_table1,
    "lift": cmd_lift,
    "partition": cmd_partition,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "threads", None):
        _accel.set_threads(args.threads)
    start = time.perf_counter()
    try:
        report, text, code = COMMANDS[args.command](args)
    except (UsageError, MalformedSpecError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - start
    report = {"command": ["hybridft", *argv], **report, "exit_code": code}
    if getattr(args, "timing", False):
        report["wall_time_s"] = round(elapsed, 3)
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2, sort_keys=False, default=str))
    else:
        print(text)
        if getattr(args, "timing", False):
            print(f"wall time: {elapsed:.2f} s")
    return code


if __name__ == "__main__":
    sys.exit(main())
