"""Versioned JSON schemas and canonical serialization.

Three document kinds, each tagged with a "schema" field: "ramsplit-model/1"
(components, points, horizontals, markers), "ramsplit-alpha/1" (residue
characters keyed by divisor then location), and "ramsplit-result/1" (the
splitting character with its certificates, verification report and blow-up
trace).  A fourth convenience envelope "ramsplit-instance/1" bundles a model
and an alpha document so generator output is a single file.

Canonical text is json.dumps with sorted keys and two-space indent plus a
trailing newline; combined with the id-sorted internal ordering of Model this
makes every serialization byte-stable under input key permutation.
"""

from __future__ import annotations

import json
from typing import Mapping

from .charalg import PrimeModulus, Scalar, char_from_json, char_to_json
from .model import (
    Coefficient,
    DistinguishedDivisor,
    Marker,
    Model,
    SingularPoint,
    VerticalComponent,
    Violation,
)
from .ramification import LocalWitt, RamificationData, ResidueCharacter
from .splitting import (
    CaseReport,
    GluingCertificate,
    SplittingCharacter,
    TraceEntry,
    VerificationReport,
)

MODEL_SCHEMA = "ramsplit-model/1"
ALPHA_SCHEMA = "ramsplit-alpha/1"
RESULT_SCHEMA = "ramsplit-result/1"
INSTANCE_SCHEMA = "ramsplit-instance/1"


class SchemaError(ValueError):
    """A document failed structural validation against its schema."""

    def __init__(self, where: str, detail: str):
        self.violations = [Violation("Schema", where, detail)]
        super().__init__(f"{where}: {detail}")


def dumps_canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _expect(doc, where: str, schema: str) -> None:
    if not isinstance(doc, Mapping):
        raise SchemaError(where, "document is not a JSON object")
    if doc.get("schema") != schema:
        raise SchemaError(where, f"expected schema {schema!r}, got {doc.get('schema')!r}")


def _field(doc, where: str, key: str):
    if key not in doc:
        raise SchemaError(where, f"missing field {key!r}")
    return doc[key]


# ---------------------------------------------------------------------------
# model documents


def model_to_json(m: Model) -> dict:
    return {
        "schema": MODEL_SCHEMA,
        "modulus": m.modulus.ell,
        "components": [
            {"id": c.id, "residue_field": c.residue_field, "kind": c.kind, "sign": c.sign}
            for c in m.components
        ],
        "points": [
            {"id": p.id, "incident": list(p.incident), "residue_field": p.residue_field}
            for p in m.points
        ],
        "horizontals": [
            {
                "id": h.id,
                "residue_field": h.residue_field,
                "at_point": h.at_point,
                "at_marker": h.at_marker,
                "coefficients": None
                if h.coefficients is None
                else [{"marker": c.marker, "label": c.label} for c in h.coefficients],
            }
            for h in m.horizontals
        ],
        "markers": [
            {"component": w.component, "label": w.label, "residue_field": w.residue_field}
            for w in m.markers
        ],
    }


def model_from_json(doc) -> Model:
    _expect(doc, "model", MODEL_SCHEMA)
    try:
        modulus = PrimeModulus(int(_field(doc, "model", "modulus")))
        components = tuple(
            VerticalComponent(
                str(c["id"]),
                str(c["residue_field"]),
                str(c.get("kind", "original")),
                c.get("sign"),
            )
            for c in _field(doc, "model", "components")
        )
        points = tuple(
            SingularPoint(str(p["id"]), tuple(p["incident"]), str(p["residue_field"]))
            for p in _field(doc, "model", "points")
        )
        horizontals = tuple(
            DistinguishedDivisor(
                str(h["id"]),
                str(h["residue_field"]),
                h.get("at_point"),
                h.get("at_marker"),
                None
                if h.get("coefficients") is None
                else tuple(Coefficient(c["marker"], c.get("label", "")) for c in h["coefficients"]),
            )
            for h in _field(doc, "model", "horizontals")
        )
        markers = tuple(
            Marker(str(w["component"]), str(w["label"]), str(w["residue_field"]))
            for w in _field(doc, "model", "markers")
        )
        return Model.make(modulus, components, points, horizontals, markers)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise SchemaError("model", str(err)) from err


# ---------------------------------------------------------------------------
# ramification documents


def _witt_to_json(w: LocalWitt) -> dict:
    return {"residue": w.residue.value, "value": char_to_json(w.value)}


def _witt_from_json(doc, modulus: PrimeModulus, where: str) -> LocalWitt:
    try:
        residue = Scalar(int(doc["residue"]), modulus)
        value = char_from_json(doc["value"])
    except (KeyError, TypeError, ValueError) as err:
        raise SchemaError(where, str(err)) from err
    if value.modulus != modulus and not value.is_zero:
        raise SchemaError(where, "value modulus disagrees with the document")
    return LocalWitt(residue, value)


def alpha_to_json(rd: RamificationData) -> dict:
    return {
        "schema": ALPHA_SCHEMA,
        "modulus": rd.modulus.ell,
        "residues": {
            div: {loc: _witt_to_json(w) for loc, w in ch.locals.items()}
            for div, ch in sorted(rd.residues.items())
        },
    }


def alpha_from_json(doc, model: Model) -> RamificationData:
    _expect(doc, "alpha", ALPHA_SCHEMA)
    modulus = PrimeModulus(int(_field(doc, "alpha", "modulus")))
    if modulus != model.modulus:
        raise SchemaError("alpha", "modulus disagrees with the model")
    raw = _field(doc, "alpha", "residues")
    if not isinstance(raw, Mapping):
        raise SchemaError("alpha", "residues must be an object")
    residues = {}
    for div, locs in raw.items():
        if not isinstance(locs, Mapping):
            raise SchemaError(f"alpha:{div}", "locals must be an object")
        residues[str(div)] = ResidueCharacter(
            str(div),
            {str(loc): _witt_from_json(w, modulus, f"alpha:{div}@{loc}") for loc, w in locs.items()},
        )
    return RamificationData(modulus, model, residues)


# ---------------------------------------------------------------------------
# instance envelopes


def instance_to_json(m: Model, rd: RamificationData) -> dict:
    return {"schema": INSTANCE_SCHEMA, "model": model_to_json(m), "alpha": alpha_to_json(rd)}


def instance_from_json(doc) -> tuple[Model, RamificationData]:
    _expect(doc, "instance", INSTANCE_SCHEMA)
    m = model_from_json(_field(doc, "instance", "model"))
    return m, alpha_from_json(_field(doc, "instance", "alpha"), m)


# ---------------------------------------------------------------------------
# result documents


def _scalar_or_none(s: Scalar | None):
    return None if s is None else s.value


def result_to_json(
    psi: SplittingCharacter, report: VerificationReport, trace: tuple[TraceEntry, ...]
) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "modulus": psi.modulus.ell,
        "character": {
            cid: {
                "global_marker": _scalar_or_none(comp.global_marker),
                "locals": {loc: _witt_to_json(w) for loc, w in comp.locals.items()},
                "rules": {
                    loc: {"kind": r.kind, "n": _scalar_or_none(r.n), "sign": r.sign}
                    for loc, r in comp.rules.items()
                },
            }
            for cid, comp in sorted(psi.components.items())
        },
        "certificates": [
            {
                "point": c.point,
                "divisor": c.divisor,
                "left": c.left,
                "right": c.right,
                "coefficients": {
                    cid: {"label": label, "class": char_to_json(k)}
                    for cid, (label, k) in sorted(c.coefficients.items())
                },
                "witt_left": _witt_to_json(c.witt_left),
                "witt_right": _witt_to_json(c.witt_right),
                "matched_residue": c.matched_residue.value,
                "matched_value": char_to_json(c.matched_value),
            }
            for c in psi.certificates
        ],
        "report": {
            "passed": report.passed,
            "entries": [
                {
                    "divisor": e.divisor,
                    "case": e.case,
                    "e": e.e,
                    "residue_killed": e.residue_killed,
                    "trace": e.trace,
                }
                for e in report.entries
            ],
        },
        "blowups": [
            {
                "location": e.location,
                "reason": e.reason,
                "kind": e.kind,
                "exceptional": e.exceptional,
                "multiple": _scalar_or_none(e.multiple),
                "chain": e.chain,
            }
            for e in trace
        ],
    }


def result_from_json(doc) -> tuple[dict, tuple[CaseReport, ...], tuple[TraceEntry, ...]]:
    """Parse a result document structurally.

    The character section comes back as plain data (the model is not part of
    the document, so component characters are not rebuilt); report entries
    and trace entries are reconstructed as their dataclasses.
    """
    _expect(doc, "result", RESULT_SCHEMA)
    modulus = PrimeModulus(int(_field(doc, "result", "modulus")))
    report = tuple(
        CaseReport(e["divisor"], e["case"], int(e["e"]), bool(e["residue_killed"]), e["trace"])
        for e in _field(doc, "result", "report")["entries"]
    )
    trace = tuple(
        TraceEntry(
            e["location"],
            e["reason"],
            e["kind"],
            e["exceptional"],
            None if e["multiple"] is None else Scalar(int(e["multiple"]), modulus),
            e["chain"],
        )
        for e in _field(doc, "result", "blowups")
    )
    return dict(_field(doc, "result", "character")), report, trace
