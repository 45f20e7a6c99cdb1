"""Command-line entry point: ``cartanq check | run | decompose``.

Exit status is 0 when every assertion passed, 1 when one failed (or an
input matrix is not in the group) and 2 for usage or parse errors.
Reports are JSON with sorted keys, so equal inputs give equal bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .checks import run_check
from .core import TOL
from .frames import invariance_report
from .group import GroupElement, NotInGroupError, NumericallySingularError, cartan_decompose, unitary_residual
from .measurement import born, compose_sequence, expectation, expectation_trace
from .operators import max_residual
from .scenario import Scenario, ScenarioError, load_json, parse_matrix, parse_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _m(a) -> list:
    return [[_c(v) for v in row] for row in np.asarray(a)]


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def run_report(scn: Scenario) -> dict:
    """Evaluate every system, pipeline and the optional frame of a scenario."""
    tol = scn.tol
    checks = {}
    systems = {}
    for label, sys_ in sorted(scn.systems.items()):
        s = sys_.state
        probs = [born(s, 0), born(s, 1)]
        entry = {
            "sector": str(s.sector),
            "amplitudes": [_c(a) for a in s.amplitudes],
            "born": probs,
        }
        checks[f"born-sum:{label}"] = abs(sum(probs) - 1.0)
        if sys_.observable is not None:
            ev = expectation(sys_.observable, s)
            tr = expectation_trace(sys_.observable, s)
            entry["spectrum"] = list(sys_.observable.spectrum)
            entry["expectation"] = ev
            checks[f"expectation-routes:{label}"] = abs(ev - tr)
        systems[label] = entry

    pipelines = {}
    for name, devices in sorted(scn.pipelines.items()):
        r = compose_sequence(devices)
        entry = {
            "devices": [d.label for d in devices],
            "sector": str(devices[0].sector),
            "operator": _m(r.operator.entries),
            "weights": [_c(w) for w in r.weights],
            "transmission": _c(r.transmission),
            "trace": _c(r.trace),
        }
        if r.closed_form is not None:
            entry["coefficient"] = _c(r.coefficient)
            entry["closed_form_residual"] = r.closed_form_residual
            checks[f"closed-form:{name}"] = r.closed_form_residual
        pipelines[name] = entry

    doc = {
        "command": "run",
        "tol": tol,
        "seed": scn.seed,
        "systems": systems,
        "pipelines": pipelines,
        "checks": {
            k: {"residual": v, "threshold": tol, "status": "PASS" if v < tol else "FAIL"}
            for k, v in sorted(checks.items())
        },
    }
    passed = all(v < tol for v in checks.values())
    if scn.frame is not None:
        labels = sorted(scn.systems)
        states = [scn.systems[k].state for k in labels]
        observables = [scn.systems[k].observable for k in labels]
        rep = invariance_report(states, scn.frame, observables, tol)
        doc["frame"] = {
            "label": scn.frame.label,
            "blocks": {
                "+": _m(scn.frame.map.plus.entries),
                "-": _m(scn.frame.map.minus.entries),
            },
            "distance_from_identity": scn.frame.distance_from_identity(),
        }
        doc["invariance"] = rep.to_dict()
        passed = passed and rep.passed
    doc["passed"] = passed
    return doc


def decompose_report(matrix, tol: float = TOL) -> dict:
    u = GroupElement.certify(matrix, tol)
    f = cartan_decompose(u, tol)
    U, H = f.unitary_part.matrix, f.positive_part.matrix
    residual = max_residual(U @ H, u.matrix)
    unit = unitary_residual(U)
    min_eig = float(np.linalg.eigvalsh(H).min())
    threshold = 10 * tol
    return {
        "command": "decompose",
        "tol": tol,
        "U": _m(U),
        "H": _m(H),
        "reconstruction_residual": residual,
        "unitary_residual": unit,
        "min_eigenvalue_H": min_eig,
        "passed": residual < threshold and unit < threshold and min_eig > 0,
    }


def _text_check(doc: dict) -> str:
    lines = [f"check seed={doc['seed']} trials={doc['trials']} tol={doc['tol']!r}"]
    for suite, body in sorted(doc["suites"].items()):
        for claim, c in sorted(body["claims"].items()):
            value = c.get("max_residual", c.get("min_change"))
            kind = "max" if "max_residual" in c else "min"
            lines.append(
                f"{c['status']} {suite}/{claim} {kind}={value:.3e} threshold={c['threshold']:.1e}"
                f" failures={c['failures']}"
            )
    lines.append("OVERALL " + ("PASS" if doc["passed"] else "FAIL"))
    return "\n".join(lines)


def _text_run(doc: dict) -> str:
    lines = []
    for label, s in sorted(doc["systems"].items()):
        extra = f" <S>={s['expectation']:.12g}" if "expectation" in s else ""
        lines.append(f"system {label} ({s['sector']}) born={s['born'][0]:.12g},{s['born'][1]:.12g}{extra}")
    for name, p in sorted(doc["pipelines"].items()):
        t = complex(*p["transmission"])
        tr = complex(*p["trace"])
        lines.append(f"pipeline {name}: {' '.join(p['devices'])} weight={t:.12g} trace={tr:.12g}")
    for k, c in sorted(doc["checks"].items()):
        lines.append(f"{c['status']} {k} residual={c['residual']:.3e}")
    if "invariance" in doc:
        inv = doc["invariance"]
        for k, c in inv["claims"].items():
            lines.append(f"{c['status']} invariance/{k} residual={c['residual']:.3e}")
        for k, c in inv["non_invariants"].items():
            lines.append(f"{c['status']} changes/{k} change={c['residual']:.3e}")
    lines.append("OVERALL " + ("PASS" if doc["passed"] else "FAIL"))
    return "\n".join(lines)


def _text_decompose(doc: dict) -> str:
    lines = []
    for key in ("U", "H"):
        lines.append(f"{key} =")
        for row in doc[key]:
            lines.append("  " + "  ".join(f"{complex(*v):.10f}" for v in row))
    lines.append(f"reconstruction residual {doc['reconstruction_residual']:.3e}")
    lines.append(f"unitary residual {doc['unitary_residual']:.3e}")
    lines.append(f"min eigenvalue of H {doc['min_eigenvalue_H']:.6g}")
    lines.append("OVERALL " + ("PASS" if doc["passed"] else "FAIL"))
    return "\n".join(lines)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cartanq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run the seeded invariant suites")
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--trials", type=_positive_int, default=1000)
    c.add_argument("--tol", type=_positive_float, default=TOL)
    c.add_argument("--format", choices=("json", "text"), default="json")

    r = sub.add_parser("run", help="execute a scenario file")
    r.add_argument("--scenario", required=True)
    r.add_argument("--tol", type=_positive_float, default=None, help="overrides the scenario tol")
    r.add_argument("--format", choices=("json", "text"), default="json")

    d = sub.add_parser("decompose", help="Cartan decomposition of a 4x4 group element")
    d.add_argument("--input", required=True)
    d.add_argument("--tol", type=_positive_float, default=TOL)
    d.add_argument("--format", choices=("json", "text"), default="json")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "check":
            doc = run_check(args.seed, args.trials, args.tol)
            text = _dump(doc) if args.format == "json" else _text_check(doc)
        elif args.command == "run":
            scn = parse_scenario(_read(args.scenario), args.tol)
            doc = run_report(scn)
            text = _dump(doc) if args.format == "json" else _text_run(doc)
        else:
            raw = load_json(_read(args.input))
            node = raw.get("matrix") if isinstance(raw, dict) else raw
            if node is None:
                raise ScenarioError(getattr(raw, "line", 1), "missing key 'matrix'")
            doc = decompose_report(parse_matrix(node, 4, raw), args.tol)
            text = _dump(doc) if args.format == "json" else _text_decompose(doc)
    except OSError as exc:
        print(f"cartanq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"cartanq: {getattr(args, 'scenario', None) or args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotInGroupError, NumericallySingularError) as exc:
        print(f"cartanq: {exc}", file=sys.stderr)
        return EXIT_FAIL

    print(text)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
