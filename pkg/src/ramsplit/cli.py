"""Subcommand front end over the model, ramification and splitting modules.

Every command is a pure function of its flags and input files: no
environment variables, no timestamps, canonical JSON out.  Exit codes: 0 for
success (including an all-pass verification), 2 when a hot point forces
index l^2, 3 for schema or validation failures and usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .model import Model, Violation, blow_up, decompose, export_dot, validate_model
from .ramification import (
    InfeasibleParams,
    NotDoublyRamified,
    RamificationData,
    classify_point,
    generate_random,
    index_criterion,
    validate_reciprocity,
)
from .charalg import char_to_json
from .serialize import (
    INSTANCE_SCHEMA,
    SchemaError,
    alpha_from_json,
    dumps_canonical,
    instance_from_json,
    instance_to_json,
    model_from_json,
    model_to_json,
    result_to_json,
)
from .splitting import (
    HotBlowupUnsupported,
    IndexTooLarge,
    InvalidInput,
    blowup_residue,
    location_kind,
    split,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); 2 is taken
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="ramsplit", description="ramification splitting toolkit")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, text, inputs=True, formats=("json", "text"), default="json"):
        q = sub.add_parser(name, help=text, description=text)
        if inputs:
            q.add_argument(
                "inputs",
                nargs="+",
                metavar="FILE",
                help="an instance file, a model file, or a model file plus an alpha file",
            )
        q.add_argument("--format", choices=formats, default=default)
        return q

    add("validate", "check documents against the structural and reciprocity rules")
    q = add("classify", "hot/cold/neutral classification of doubly ramified locations")
    q.add_argument("--at", help="classify a single location")
    add("index", "period-index criterion; exits 2 when a hot point forces l^2")
    q = add("split", "build and verify a splitting character")
    q.add_argument("--even-padding", action="store_true", help="pad an odd blow-up trace")
    add("decompose", "cycle clusters, connecting paths, tails and isolated trees")
    q = add("blowup", "blow up one location, transporting residue data when present", formats=("json",))
    q.add_argument("--at", required=True, help="singular point id or marker label")
    q.add_argument("--kind", choices=("neutral", "cold", "single", "none", "marker"))
    q = add("gen", "deterministic valid random instance", inputs=False, formats=("json",))
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--ell", type=int, default=3)
    q.add_argument("--components", type=int, default=8)
    q.add_argument("--cycles", type=int, default=1)
    q.add_argument("--hot-allowed", action="store_true")
    q.add_argument("--cold-fraction", type=float, default=0.5)
    add("export-dot", "decorated DOT graph", formats=("dot",), default="dot")
    return p


def _load(paths: list[str]) -> tuple[Model, RamificationData | None]:
    docs = []
    for path in paths:
        try:
            docs.append(json.loads(Path(path).read_text(encoding="utf-8")))
        except OSError as err:
            raise SchemaError(path, str(err)) from err
        except json.JSONDecodeError as err:
            raise SchemaError(path, f"not valid JSON: {err}") from err
    if len(docs) == 1:
        doc = docs[0]
        if isinstance(doc, dict) and doc.get("schema") == INSTANCE_SCHEMA:
            return instance_from_json(doc)
        return model_from_json(doc), None
    if len(docs) == 2:
        m = model_from_json(docs[0])
        return m, alpha_from_json(docs[1], m)
    raise SchemaError("input", "expected one or two input files")


def _need_alpha(rd: RamificationData | None) -> RamificationData:
    if rd is None:
        raise SchemaError("input", "this command needs residue data (alpha document)")
    return rd


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _violations_out(violations: list[Violation], fmt: str) -> str:
    if fmt == "json":
        doc = {
            "violations": [
                {"code": v.code, "where": v.where, "detail": v.detail} for v in violations
            ]
        }
        return dumps_canonical(doc)
    if not violations:
        return "ok\n"
    return "".join(f"{v.code} at {v.where}: {v.detail}".rstrip() + "\n" for v in violations)


# ---------------------------------------------------------------------------
# command bodies


def _cmd_validate(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    violations = validate_model(m)
    if not violations and rd is not None:
        violations = validate_reciprocity(rd)
    return (3 if violations else 0), _violations_out(violations, args.format)


def _cmd_classify(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    rd = _need_alpha(rd)
    locations = [args.at] if args.at else rd.doubly_ramified_points() + rd.ramified_pair_markers()
    rows = [classify_point(rd, z) for z in locations]
    if args.format == "json":
        doc = {
            "classifications": [
                {
                    "location": c.location,
                    "kind": c.kind,
                    "divisors": list(c.divisors),
                    "residues": [r.value for r in c.residues],
                    "values": [char_to_json(v) for v in c.values],
                    "ratio": None if c.ratio is None else c.ratio.value,
                }
                for c in rows
            ]
        }
        return 0, dumps_canonical(doc)
    table = _table(
        ["location", "kind", "divisors", "residues", "ratio"],
        [
            [
                c.location,
                c.kind,
                "|".join(c.divisors),
                "|".join(str(r.value) for r in c.residues),
                "-" if c.ratio is None else str(c.ratio.value),
            ]
            for c in rows
        ],
    )
    return 0, table


def _cmd_index(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    rd = _need_alpha(rd)
    report = index_criterion(rd)
    code = 2 if report.hot_witness is not None else 0
    if args.format == "json":
        doc = {
            "bound": report.bound,
            "exponent": report.exponent,
            "hot_witness": report.hot_witness,
            "modulus": report.modulus.ell,
            "note": report.note,
            "unramified": report.unramified,
        }
        return code, dumps_canonical(doc)
    ell = report.modulus.ell
    if report.hot_witness is not None:
        return code, f"index bound l^2 = {ell}^2 = {report.bound}; hot witness {report.hot_witness}\n"
    return code, f"index bound l = {report.bound}; no hot points\n"


def _cmd_split(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    rd = _need_alpha(rd)
    psi, report, trace = split(m, rd, even_padding=args.even_padding)
    if args.format == "json":
        return (0 if report.passed else 1), dumps_canonical(result_to_json(psi, report, trace))
    table = _table(
        ["divisor", "case", "e", "killed", "note"],
        [
            [e.divisor, e.case, str(e.e), "yes" if e.residue_killed else "NO", e.trace]
            for e in report.entries
        ],
    )
    tail = (
        f"blowups: {len(trace)}\n"
        f"certificates: {len(psi.certificates)}\n"
        f"passed: {'yes' if report.passed else 'no'}\n"
    )
    return (0 if report.passed else 1), table + tail


def _cmd_decompose(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    rd = _need_alpha(rd)
    dec = decompose(m, set(rd.ram_verticals))
    doc = {
        "clusters": [list(c) for c in dec.clusters],
        "connecting_paths": [list(c) for c in dec.connecting_paths],
        "cycles": [list(c) for c in dec.cycles],
        "isolated_trees": [list(c) for c in dec.isolated_trees],
        "point_class": dict(sorted(dec.point_class.items())),
        "tails": [list(c) for c in dec.tails],
    }
    if args.format == "json":
        return 0, dumps_canonical(doc)
    lines = []
    for key in ("clusters", "connecting_paths", "tails", "isolated_trees", "cycles"):
        for group in doc[key]:
            lines.append(f"{key}: {' '.join(group)}")
    for pid, kind in doc["point_class"].items():
        lines.append(f"point {pid}: {kind}")
    return 0, "\n".join(lines) + "\n" if lines else "empty\n"


def _cmd_blowup(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    if rd is None:
        m2, _ = blow_up(m, args.at)
        return 0, dumps_canonical(model_to_json(m2))
    kind = args.kind or location_kind(rd, args.at)
    rd2, _ = blowup_residue(rd, args.at, kind)
    return 0, dumps_canonical(instance_to_json(rd2.model, rd2))


def _cmd_gen(args) -> tuple[int, str]:
    m, rd = generate_random(
        args.seed,
        ell=args.ell,
        n_components=args.components,
        n_cycles=args.cycles,
        hot_allowed=args.hot_allowed,
        cold_fraction=args.cold_fraction,
    )
    return 0, dumps_canonical(instance_to_json(m, rd))


def _cmd_export_dot(args) -> tuple[int, str]:
    m, rd = _load(args.inputs)
    decorations = None
    if rd is not None:
        decorations = {
            "ram": set(rd.ram_verticals),
            "edge_class": {z: classify_point(rd, z).kind for z in rd.doubly_ramified_points()},
        }
    return 0, export_dot(m, decorations)


_COMMANDS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "index": _cmd_index,
    "split": _cmd_split,
    "decompose": _cmd_decompose,
    "blowup": _cmd_blowup,
    "gen": _cmd_gen,
    "export-dot": _cmd_export_dot,
}


def run(argv: list[str]) -> tuple[int, str]:
    """Execute one invocation; returns (exit code, output text)."""
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as err:
        return 3, f"usage error: {err}\n"
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        return 3, f"usage error: {err}\n"
    except (SchemaError, InvalidInput) as err:
        fmt = getattr(args, "format", "json")
        if fmt not in ("json", "text"):
            fmt = "text"
        return 3, _violations_out(list(err.violations), fmt)
    except IndexTooLarge as err:
        report = err.report
        doc = {
            "bound": report.bound,
            "error": "IndexTooLarge",
            "modulus": report.modulus.ell,
            "witness": err.witness,
        }
        if getattr(args, "format", "json") == "text":
            return 2, f"index l^2 = {report.bound}; hot witness {err.witness}\n"
        return 2, dumps_canonical(doc)
    except (NotDoublyRamified, HotBlowupUnsupported, InfeasibleParams, ValueError) as err:
        return 3, f"error: {err}\n"
    except KeyError as err:
        return 3, f"error: unknown id {err}\n"


def main(argv: list[str] | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
