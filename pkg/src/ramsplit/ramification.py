"""Ramification data of a prime-period Brauer class on a dual-graph model.

Each ramified divisor carries a residue character; at every relevant closed
point the character is stored through its Witt decomposition (unramified
value, residue against the canonical twist generator of the point).  Missing
locals read as (residue 0, value 0).

Kato reciprocity ties the residues together pointwise: where two ramified
components meet, residues-of-residues cancel; where only one passes, its
residue vanishes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .charalg import (
    CharClass,
    GeneratorId,
    PrimeModulus,
    Scalar,
    same_line,
    scale,
    solve_ratio,
    zero,
)
from .model import (
    DistinguishedDivisor,
    Marker,
    Model,
    SingularPoint,
    VerticalComponent,
    Violation,
)


class NotDoublyRamified(ValueError):
    pass


class InfeasibleParams(ValueError):
    pass


@dataclass(frozen=True)
class LocalWitt:
    """Witt decomposition of a character at one closed point: value + residue."""

    residue: Scalar
    value: CharClass


@dataclass(frozen=True)
class ResidueCharacter:
    """The residue character of one ramified divisor, given through its locals.

    nonzero records that the divisor is genuinely ramified; characters of
    unramified divisors are never stored at all.
    """

    divisor: str
    locals: dict[str, LocalWitt]
    nonzero: bool = True


@dataclass(frozen=True)
class RamificationData:
    modulus: PrimeModulus
    model: Model
    residues: dict[str, ResidueCharacter]

    def zero_witt(self) -> LocalWitt:
        return LocalWitt(Scalar(0, self.modulus), zero(self.modulus))

    def local(self, divisor: str, location: str) -> LocalWitt:
        ch = self.residues.get(divisor)
        if ch is None:
            return self.zero_witt()
        return ch.locals.get(location, self.zero_witt())

    @property
    def ram_verticals(self) -> tuple[str, ...]:
        return tuple(sorted(d for d in self.residues if d in self.model.comp_by_id))

    @property
    def ram_horizontals(self) -> tuple[str, ...]:
        return tuple(sorted(d for d in self.residues if d in self.model.horizontal_by_id))

    def doubly_ramified_points(self) -> list[str]:
        ram = set(self.residues)
        return [
            p.id
            for p in self.model.points
            if p.incident[0] in ram and p.incident[1] in ram and p.incident[0] != p.incident[1]
        ]

    def ramified_pair_markers(self) -> list[str]:
        """Marker labels where a ramified horizontal sits on a ramified host."""
        ram = set(self.residues)
        out = []
        for h in self.model.horizontals:
            if h.id in ram and h.at_marker is not None:
                w = self.model.marker_by_label.get(h.at_marker)
                if w is not None and w.component in ram:
                    out.append(h.at_marker)
        return sorted(out)


# ---------------------------------------------------------------------------
# reciprocity


def validate_reciprocity(rd: RamificationData) -> list[Violation]:
    out: list[Violation] = []
    m = rd.model

    for div in sorted(rd.residues):
        ch = rd.residues[div]
        if not ch.nonzero:
            out.append(Violation("OmittedCharacter", div, "unramified characters are omitted, not flagged"))
        if div in m.comp_by_id:
            allowed = {p.id for p in m.points if div in p.incident}
            allowed |= {w.label for w in m.markers if w.component == div}
            for loc in sorted(set(ch.locals) - allowed):
                out.append(Violation("BadLocals", div, f"component does not pass through {loc}"))
            for w in m.markers:
                if w.component == div and w.label in ch.locals:
                    if not ch.locals[w.label].residue.is_zero:
                        out.append(Violation("StrayResidue", w.label, f"{div} is the only divisor with a residue here"))
        elif div in m.horizontal_by_id:
            h = m.horizontal_by_id[div]
            if h.at_point is not None:
                out.append(Violation("HorizontalAtPoint", div, f"ramified horizontal attached at singular point {h.at_point}"))
            loc = h.location
            if loc is None or set(ch.locals) != {loc}:
                out.append(Violation("BadLocals", div, "horizontal stores exactly one local, at its own location"))
            else:
                lw = ch.locals[loc]
                if not lw.residue.is_zero:
                    out.append(Violation("HorizontalResidue", div, "complete residue field: residue component vanishes"))
                if lw.value.is_zero:
                    out.append(Violation("ZeroCharacter", div, "ramified horizontal needs a nonzero character"))
        else:
            out.append(Violation("UnknownDivisor", div, "not a component or horizontal of the model"))

        for loc in sorted(ch.locals):
            lw = ch.locals[loc]
            if lw.residue.modulus != rd.modulus or lw.value.modulus != rd.modulus:
                out.append(Violation("ModulusMismatch", loc, f"local of {div} built over a different prime"))
                continue
            if loc in m.point_by_id or loc in m.marker_by_label:
                space = m.location_space(loc)
                if lw.value.space not in (None, space):
                    out.append(Violation("SpaceMismatch", loc, f"value of {div} lives in {lw.value.space}, location in {space}"))

    ram = set(rd.residues)
    for p in m.points:
        a, b = p.incident
        wa, wb = rd.local(a, p.id), rd.local(b, p.id)
        if wa.residue.modulus != rd.modulus or wb.residue.modulus != rd.modulus:
            continue
        if a in ram and b in ram:
            if not (wa.residue + wb.residue).is_zero:
                out.append(Violation("UnbalancedResidues", p.id, f"residues of {a} and {b} do not cancel"))
        elif (a in ram) != (b in ram):
            d, w = (a, wa) if a in ram else (b, wb)
            if not w.residue.is_zero:
                out.append(Violation("StrayResidue", p.id, f"{d} is the only ramified component here"))
    return out


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class PointClass:
    """Hot/cold/neutral classification of a doubly-ramified location.

    divisors are the two ramified divisors through it, lower id first at a
    singular point, (host component, horizontal) at a marker; ratio is the n
    with value1 = n * value2, defined for neutral points only.
    """

    kind: str
    location: str
    divisors: tuple[str, str]
    residues: tuple[Scalar, Scalar]
    values: tuple[CharClass, CharClass]
    ratio: Scalar | None


def _pair_at(rd: RamificationData, location: str) -> tuple[str, str]:
    m = rd.model
    ram = set(rd.residues)
    if location in m.point_by_id:
        a, b = m.point_by_id[location].incident
        if a == b or a not in ram or b not in ram:
            raise NotDoublyRamified(location)
        return a, b
    if location in m.marker_by_label:
        host = m.marker_by_label[location].component
        h = m.horizontal_at(location)
        if h is None or h.id not in ram or host not in ram:
            raise NotDoublyRamified(location)
        return host, h.id
    raise NotDoublyRamified(location)


def classify_point(rd: RamificationData, z: str) -> PointClass:
    d1, d2 = _pair_at(rd, z)
    w1, w2 = rd.local(d1, z), rd.local(d2, z)
    residues = (w1.residue, w2.residue)
    values = (w1.value, w2.value)
    if not w1.residue.is_zero and not w2.residue.is_zero:
        return PointClass("cold", z, (d1, d2), residues, values, None)
    if not same_line(w1.value, w2.value):
        return PointClass("hot", z, (d1, d2), residues, values, None)
    return PointClass("neutral", z, (d1, d2), residues, values, solve_ratio(w1.value, w2.value))


@dataclass(frozen=True)
class IndexReport:
    modulus: PrimeModulus
    hot_witness: str | None
    unramified: bool
    note: str = ""

    @property
    def exponent(self) -> int:
        return 2 if self.hot_witness is not None else 1

    @property
    def bound(self) -> int:
        return self.modulus.ell ** self.exponent


def index_criterion(rd: RamificationData) -> IndexReport:
    """Index l^2 with a hot witness, else l; purely the hot-point criterion."""
    if not rd.residues:
        return IndexReport(rd.modulus, None, True, "unramified: index 1 divides l")
    for loc in rd.doubly_ramified_points() + rd.ramified_pair_markers():
        if classify_point(rd, loc).kind == "hot":
            return IndexReport(rd.modulus, loc, False, "hot point: l^2 divides the index")
    return IndexReport(rd.modulus, None, False, "no hot points: the index divides l")


# ---------------------------------------------------------------------------
# random instances

# Only randrange-derived draws below: their sequences are stable across
# interpreter versions, which keeps golden fixtures byte-stable.


def _pick(rng: random.Random, seq):
    return seq[rng.randrange(len(seq))]


def generate_random(
    seed: int,
    *,
    ell: int = 3,
    n_components: int = 8,
    n_cycles: int = 1,
    hot_allowed: bool = False,
    cold_fraction: float = 0.5,
) -> tuple[Model, RamificationData]:
    """A deterministic valid model plus reciprocity-valid ramification data.

    The ramified subgraph is a tree plus exactly n_cycles extra edges, so its
    Betti number is n_cycles.  Cold edges get residues (r, -r); neutral edges
    proportional values; hot edges (only when allowed) independent generators.
    """
    if n_components < 1:
        raise InfeasibleParams("need at least one component")
    if n_cycles < 0:
        raise InfeasibleParams("n_cycles must be nonnegative")
    if n_cycles > 0 and n_components < 2:
        raise InfeasibleParams("cycles need at least two components")
    if not 0.0 <= cold_fraction <= 1.0:
        raise InfeasibleParams("cold_fraction must lie in [0, 1]")

    mod = PrimeModulus(ell)
    rng = random.Random(seed)
    n_ram = 1 if n_components == 1 else 2 + rng.randrange(n_components - 1)
    comp_ids = [f"c{i}" for i in range(n_components)]
    ram_ids = comp_ids[:n_ram]

    counter = itertools.count()
    edges: list[tuple[str, str, str]] = []

    def new_point(a: str, b: str) -> str:
        pid = f"z{next(counter)}"
        edges.append((pid, min(a, b), max(a, b)))
        return pid

    for i in range(1, n_ram):
        new_point(_pick(rng, ram_ids[:i]), ram_ids[i])
    for _ in range(n_cycles):
        u = rng.randrange(n_ram)
        v = rng.randrange(n_ram - 1)
        v += v >= u
        new_point(ram_ids[u], ram_ids[v])
    for i in range(n_ram, n_components):
        new_point(_pick(rng, comp_ids[:i]), comp_ids[i])
    if n_components > n_ram:
        for _ in range(rng.randrange(3)):
            u = _pick(rng, comp_ids[n_ram:])
            v = _pick(rng, [c for c in comp_ids if c != u])
            new_point(u, v)

    def unit() -> int:
        return 1 + rng.randrange(ell - 1)

    def rand_value(space: str, nonzero: bool = False) -> CharClass:
        while True:
            c1, c2 = rng.randrange(ell), rng.randrange(ell)
            if not nonzero or c1 or c2:
                return CharClass.make(
                    mod, {GeneratorId("g1", space): c1, GeneratorId("g2", space): c2}
                )

    def gen_value(name: str, space: str) -> CharClass:
        return CharClass.make(mod, {GeneratorId(name, space): unit()})

    z0 = Scalar(0, mod)
    chars: dict[str, dict[str, LocalWitt]] = {cid: {} for cid in ram_ids}
    for pid, a, b in edges:
        space = f"k({pid})"
        if a in chars and b in chars:
            if hot_allowed and rng.randrange(4) == 0:
                chars[a][pid] = LocalWitt(z0, gen_value("g1", space))
                chars[b][pid] = LocalWitt(z0, gen_value("g2", space))
            elif rng.randrange(1000) / 1000 < cold_fraction:
                r = Scalar(unit(), mod)
                chars[a][pid] = LocalWitt(r, rand_value(space))
                chars[b][pid] = LocalWitt(-r, rand_value(space))
            elif rng.randrange(5) == 0:
                chars[a][pid] = LocalWitt(z0, zero(mod))
                chars[b][pid] = LocalWitt(z0, zero(mod))
            else:
                v = rand_value(space, nonzero=True)
                chars[a][pid] = LocalWitt(z0, scale(Scalar(unit(), mod), v))
                chars[b][pid] = LocalWitt(z0, v)
        elif a in chars or b in chars:
            d = a if a in chars else b
            chars[d][pid] = LocalWitt(z0, rand_value(space))

    markers: list[Marker] = []
    horizontals: list[DistinguishedDivisor] = []
    hchars: dict[str, dict[str, LocalWitt]] = {}
    for j in range(rng.randrange(3)):
        host = _pick(rng, comp_ids)
        label = f"w{j}"
        space = f"k({label})"
        markers.append(Marker(host, label, space))
        hid = f"h{j}"
        horizontals.append(DistinguishedDivisor(hid, f"k({hid})", at_marker=label))
        if rng.randrange(4) == 0:
            continue  # unramified horizontal: marker decoration only
        if host in chars:
            if hot_allowed and rng.randrange(4) == 0:
                host_value = gen_value("g1", space)
                theta = gen_value("g2", space)
            else:
                host_value = rand_value(space, nonzero=True)
                theta = scale(Scalar(unit(), mod), host_value)
            chars[host][label] = LocalWitt(z0, host_value)
            hchars[hid] = {label: LocalWitt(z0, theta)}
        else:
            hchars[hid] = {label: LocalWitt(z0, rand_value(space, nonzero=True))}

    model = Model.make(
        mod,
        [VerticalComponent(cid, f"k({cid})") for cid in comp_ids],
        [SingularPoint(pid, (a, b), f"k({pid})") for pid, a, b in edges],
        horizontals,
        markers,
    )
    residues = {cid: ResidueCharacter(cid, locs) for cid, locs in chars.items()}
    residues |= {hid: ResidueCharacter(hid, locs) for hid, locs in hchars.items()}
    return model, RamificationData(mod, model, residues)
