"""Construction and verification of degree-l splitting characters.

The pipeline turns validated residue data into a character psi, one local
character per vertical component, that kills the restriction of the class to
every ramified divisor:

* blow-up surgeries transport residue data across edge subdivisions and
  marker blow-ups (``blowup_residue``),
* ``make_acceptable`` repairs odd dual-graph cycles, ``reduce_betti`` breaks
  the remaining ramified cycles at neutral points with insertion chains,
* clusters and connecting paths get psi = (sign) * theta from the bipartition,
  trees and tails get unit multiples propagated across cold and neutral
  points, unramified components are filled by copy-forward rules and closed
  with a Grunwald-Wang style existence handle,
* every cold point receives a replayable gluing certificate, and
  ``verify_splitting`` re-checks each ramified divisor case by case.

Hot points are never worked around: they force index l^2 and surface as
``IndexTooLarge`` with the witness location.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .charalg import CharClass, PrimeModulus, Scalar, same_line, scale, solve_ratio, zero
from .model import (
    Marker,
    Model,
    UnknownLocation,
    Violation,
    bipartite_repair_plan,
    blow_up,
    decompose,
    two_color,
    validate_model,
    with_signs,
)
from .ramification import (
    IndexReport,
    LocalWitt,
    RamificationData,
    ResidueCharacter,
    classify_point,
    index_criterion,
    validate_reciprocity,
)


class InvalidInput(ValueError):
    """The model or residue data failed validation."""

    def __init__(self, violations: Iterable[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(f"{v.code} at {v.where}" for v in self.violations))


class IndexTooLarge(Exception):
    """A hot point forces index l^2: no degree-l character can split."""

    def __init__(self, witness: str, report: IndexReport):
        self.witness = witness
        self.report = report
        super().__init__(f"hot point at {witness}")


class HotBlowupUnsupported(ValueError):
    """Blowing up a hot point has no single-line exceptional transport."""


class HotPointEncountered(ValueError):
    """A propagation step ran into a hot pairing."""


class RatioAbsent(ValueError):
    """No proportionality constant exists at a supposedly neutral point."""


class ConflictingConstraints(ValueError):
    """Two processed neighbours demand different multipliers."""


class NotCold(ValueError):
    """cold_glue needs both residues nonzero."""


class MissingLocal(KeyError):
    """glue_check needs local data on both incident components."""


class InconsistentLocals(ValueError):
    """The same location was constrained twice with different data."""


# ---------------------------------------------------------------------------
# blow-up transport


@dataclass(frozen=True)
class TraceEntry:
    """One recorded blow-up.

    multiple is the inserted value multiple at neutral subdivisions, with
    Scalar(0) once the exceptional comes out unramified, and the exceptional
    residue at the first new point for cold ones; chain groups the entries of
    one betti-reduction chain.
    """

    location: str
    reason: str  # bipartite-repair | cycle-break | connecting-break | padding
    kind: str  # neutral | cold | single | none | marker
    exceptional: str
    multiple: Scalar | None = None
    chain: int | None = None


def _check_pair(m: Model, rd: RamificationData) -> None:
    if rd.model != m:
        raise ValueError("model and residue data disagree")


def location_kind(rd: RamificationData, at: str) -> str:
    """Surgery classification of a location: the point kind, single, none or marker."""
    m = rd.model
    if at in m.point_by_id:
        a, b = m.point_by_id[at].incident
        ram_a, ram_b = a in rd.residues, b in rd.residues
        if ram_a and ram_b:
            return classify_point(rd, at).kind
        return "single" if ram_a or ram_b else "none"
    if at in m.marker_by_label:
        return "marker"
    raise UnknownLocation(at)


def _rekey(ch: ResidueCharacter, old: str, new: str) -> ResidueCharacter:
    locs = dict(ch.locals)
    if old in locs:
        locs[new] = locs.pop(old)
    return ResidueCharacter(ch.divisor, locs, ch.nonzero)


def blowup_residue(rd: RamificationData, at: str, kind: str) -> tuple[RamificationData, str]:
    """Blow up a location and transport the residue data across it.

    kind must name the location's actual classification (neutral, cold,
    single, none, or marker); the exceptional component inherits the sum of
    the adjacent values, acquires the negated residues at a cold point, and
    is dropped from the ramified set whenever its character vanishes.
    """
    actual = location_kind(rd, at)
    if actual == "hot":
        raise HotBlowupUnsupported(at)
    if kind != actual:
        # a ramified side restricting to nothing makes single and none coincide
        degenerate = {kind, actual} == {"single", "none"} and all(
            rd.local(c, at).residue.is_zero and rd.local(c, at).value.is_zero
            for c in rd.model.point_by_id[at].incident
        )
        if not degenerate:
            raise ValueError(f"location {at} is {actual}, not {kind}")
        actual = kind
    m2, eid = blow_up(rd.model, at)
    residues = dict(rd.residues)
    naught = Scalar(0, rd.modulus)

    if actual == "marker":
        host = rd.model.marker_by_label[at].component
        new_point = next(p.id for p in m2.points if eid in p.incident and p.id not in rd.model.point_by_id)
        exc_locals: dict[str, LocalWitt] = {}
        if host in residues:
            host_value = rd.local(host, at).value
            residues[host] = _rekey(residues[host], at, new_point)
            if not host_value.is_zero:
                exc_locals[new_point] = LocalWitt(naught, host_value)
        for h in rd.model.horizontals:
            if h.location == at and h.id in residues:
                new_label = m2.horizontal_by_id[h.id].at_marker
                residues[h.id] = _rekey(residues[h.id], at, new_label)
                if exc_locals:
                    exc_locals[new_label] = exc_locals[new_point]
        if exc_locals:
            residues[eid] = ResidueCharacter(eid, exc_locals)
        return RamificationData(rd.modulus, m2, residues), eid

    a, b = rd.model.point_by_id[at].incident
    side_point: dict[str, str] = {}
    for p in m2.points:
        if eid in p.incident and p.id not in rd.model.point_by_id:
            other = p.incident[0] if p.incident[1] == eid else p.incident[1]
            side_point[other] = p.id
    wa, wb = rd.local(a, at), rd.local(b, at)
    for cid in (a, b):
        if cid in residues:
            residues[cid] = _rekey(residues[cid], at, side_point[cid])
    value = wa.value + wb.value  # both live over the residue field of `at`
    if actual == "cold":
        residues[eid] = ResidueCharacter(
            eid,
            {
                side_point[a]: LocalWitt(-wa.residue, value),
                side_point[b]: LocalWitt(-wb.residue, value),
            },
        )
    elif not value.is_zero:
        residues[eid] = ResidueCharacter(
            eid,
            {
                side_point[a]: LocalWitt(naught, value),
                side_point[b]: LocalWitt(naught, value),
            },
        )
    return RamificationData(rd.modulus, m2, residues), eid


def _with_pad_marker(rd: RamificationData, label: str) -> RamificationData:
    m = rd.model
    host = min(m.component_ids)
    m2 = Model.make(
        m.modulus,
        m.components,
        m.points,
        m.horizontals,
        (*m.markers, Marker(host, label, f"k({label})")),
    )
    return RamificationData(rd.modulus, m2, rd.residues)


def apply_trace_entry(rd: RamificationData, entry: TraceEntry) -> RamificationData:
    """Re-run one recorded blow-up, recreating the padding marker if needed."""
    if entry.reason == "padding":
        rd = _with_pad_marker(rd, entry.location)
    rd2, _ = blowup_residue(rd, entry.location, entry.kind)
    return rd2


def _blow_traced(rd, at, reason, trace, ref=None, chain=None):
    """Blow up with a trace record; ref fixes the side the multiple refers to."""
    kind = location_kind(rd, at)
    if kind == "hot":
        raise HotBlowupUnsupported(at)
    multiple = None
    if at in rd.model.point_by_id:
        a, b = rd.model.point_by_id[at].incident
        if ref is not None and ref != a:
            a, b = b, a
        wa, wb = rd.local(a, at), rd.local(b, at)
        if kind == "cold":
            multiple = -wa.residue
        elif kind == "neutral":
            value = wa.value + wb.value
            if value.is_zero:
                multiple = Scalar(0, rd.modulus)
            else:
                multiple = solve_ratio(value, wa.value)
    rd2, eid = blowup_residue(rd, at, kind)
    trace.append(TraceEntry(at, reason, kind, eid, multiple, chain))
    return rd2, eid


# ---------------------------------------------------------------------------
# acceptability and betti reduction


def _repair_rank(rd: RamificationData, pid: str, point_class: Mapping[str, str]) -> int:
    """Preference for subdividing pid: keep the ramified subgraph intact."""
    kind = location_kind(rd, pid)
    if kind == "none":
        return 0
    if kind == "single":
        return 1
    if kind == "cold":
        return 2
    if kind == "hot":
        return 6
    a, b = rd.model.point_by_id[pid].incident
    if not (rd.local(a, pid).value + rd.local(b, pid).value).is_zero:
        return 3
    # the exceptional would be unramified: harmless on a ramified tree edge,
    # beta(ramified) drops on a ramified cycle edge
    return 5 if point_class.get(pid) == "cycle" else 4


def make_acceptable(
    m: Model, rd: RamificationData
) -> tuple[Model, RamificationData, tuple[TraceEntry, ...]]:
    """Subdivide edges until the dual graph is bipartite, then sign it.

    Each pass fixes one coloring forest and blows up a stand-in for every
    same-color non-tree edge, preferring subdivisions that leave the ramified
    subgraph untouched; a pass needs at most beta blow-ups.  Residue data is
    transported across every blow-up, so reciprocity is preserved.  Already
    acceptable input comes back unchanged.
    """
    _check_pair(m, rd)
    trace: list[TraceEntry] = []
    while True:
        plan = bipartite_repair_plan(rd.model)
        if not plan:
            break
        ram = set(rd.ram_verticals)
        point_class = decompose(rd.model, ram).point_class if ram else {}
        for _, candidates in plan:
            pick = min(candidates, key=lambda pid: (_repair_rank(rd, pid, point_class), pid))
            rd, _ = _blow_traced(rd, pick, "bipartite-repair", trace)
    colors = two_color(rd.model)
    if any(c.sign != colors[c.id] for c in rd.model.components):
        rd = RamificationData(rd.modulus, with_signs(rd.model, colors), rd.residues)
    return rd.model, rd, tuple(trace)


def reduce_betti(
    m: Model, rd: RamificationData
) -> tuple[Model, RamificationData, tuple[TraceEntry, ...]]:
    """Break every ramified cycle and connecting path at a neutral point.

    Each chain blows up the neutral point and then keeps blowing up the point
    between the reference side and the newest exceptional; the inserted value
    multiples step through n+1, n+2, ... and the chain ends after (l - n) mod l
    insertions when the exceptional comes out unramified, cutting the edge.
    Cold points stay; a hot cycle or connecting point aborts with
    IndexTooLarge.
    """
    _check_pair(m, rd)
    trace: list[TraceEntry] = []
    chain_no = 0
    while True:
        ram = set(rd.ram_verticals)
        if not ram:
            break
        point_class = decompose(rd.model, ram).point_class
        target = None
        for pid in sorted(p for p, k in point_class.items() if k in ("cycle", "connecting")):
            c = classify_point(rd, pid)
            if c.kind == "hot":
                report = IndexReport(rd.modulus, pid, False, "hot point: l^2 divides the index")
                raise IndexTooLarge(pid, report)
            if c.kind == "neutral":
                target = pid
                break
        if target is None:
            break
        reason = "cycle-break" if point_class[target] == "cycle" else "connecting-break"
        ref = rd.model.point_by_id[target].incident[0]
        at = target
        for _ in range(rd.modulus.ell + 1):
            rd, eid = _blow_traced(rd, at, reason, trace, ref=ref, chain=chain_no)
            if eid not in rd.residues:
                break
            at = next(p.id for p in rd.model.points if set(p.incident) == {ref, eid})
        else:
            raise AssertionError("insertion chain failed to terminate")
        chain_no += 1
    return rd.model, rd, tuple(trace)


# ---------------------------------------------------------------------------
# cold gluing certificates


@dataclass(frozen=True)
class GluingCertificate:
    """Replayable witness that theta_C1 and -theta_C2 glue across a cold point.

    coefficients maps each component to the symbolic unit multiplying its
    local equation in the distinguished divisor and that unit's class; the
    raw sides are theta_C1's local datum and the negated local datum of
    theta_C2, and the matched pair is the common twist residue omega with the
    shared unramified part.
    """

    point: str
    divisor: str
    left: str
    right: str
    coefficients: dict[str, tuple[str, CharClass]]
    witt_left: LocalWitt
    witt_right: LocalWitt
    matched_residue: Scalar
    matched_value: CharClass


def cold_glue(rd: RamificationData, z: str) -> GluingCertificate:
    """Choose unit coefficients making the two cold sides glue at z.

    With sides (omega, v1) and (-omega, v2) the divisor b1*pi1 + a2*pi2 with
    unit classes b1 = -omega^{-1} v1 and a2 = omega^{-1} v2 adjusts both sides
    to the same unramified part v1 - v2.
    """
    c = classify_point(rd, z)
    if c.kind != "cold":
        raise NotCold(z)
    d1, d2 = c.divisors
    r1, _ = c.residues
    v1, v2 = c.values
    inv = r1.inv()
    return GluingCertificate(
        point=z,
        divisor=f"D({z})",
        left=d1,
        right=d2,
        coefficients={d1: ("b1", scale(-inv, v1)), d2: ("a2", scale(inv, v2))},
        witt_left=LocalWitt(r1, v1),
        witt_right=LocalWitt(-c.residues[1], -v2),
        matched_residue=r1,
        matched_value=v1 - v2,
    )


def replay_certificate(cert: GluingCertificate) -> bool:
    """Recompute the matched pair from the raw sides and the coefficients."""
    _, k1 = cert.coefficients[cert.left]
    _, k2 = cert.coefficients[cert.right]
    wl, wr = cert.witt_left, cert.witt_right
    if wl.residue != wr.residue or wl.residue != cert.matched_residue:
        return False
    adjusted_left = wl.value - scale(wl.residue, k2)
    adjusted_right = wr.value - scale(wr.residue, k1)
    return adjusted_left == cert.matched_value and adjusted_right == cert.matched_value


# ---------------------------------------------------------------------------
# the splitting character


@dataclass(frozen=True)
class Rule:
    """How one local datum was fixed.

    I: unit times theta with a sign step, II: the multiplier n, A: copied
    from an earlier neighbour, B: zero ahead of a later neighbour, C: matches
    a ramified horizontal, GW-fill: unconstrained, ColdGlue: bipartition sign.
    """

    kind: str
    n: Scalar | None = None
    sign: int | None = None


@dataclass(frozen=True)
class ComponentCharacter:
    component: str
    global_marker: Scalar | None  # multiplier against theta; None when unramified
    locals: dict[str, LocalWitt]
    rules: dict[str, Rule]


@dataclass(frozen=True)
class GWHandle:
    """Existence handle for a character with finitely many prescribed locals."""

    space: str
    constraints: dict[str, LocalWitt]
    order: int

    def restriction(self, location: str) -> LocalWitt | None:
        return self.constraints.get(location)


@dataclass(frozen=True)
class SplittingCharacter:
    modulus: PrimeModulus
    components: dict[str, ComponentCharacter]
    certificates: tuple[GluingCertificate, ...]
    lifts: dict[str, GWHandle]


def grunwald_wang_lift(space: str, locals) -> GWHandle:
    """Bundle finitely many local constraints into one character handle.

    locals may be a mapping or an iterable of (location, LocalWitt) pairs;
    repeating a location with different data raises InconsistentLocals.  The
    order is the lcm of the local orders, so 1 or l.
    """
    pairs = locals.items() if isinstance(locals, Mapping) else locals
    constraints: dict[str, LocalWitt] = {}
    for loc, w in pairs:
        if loc in constraints and constraints[loc] != w:
            raise InconsistentLocals(loc)
        constraints[loc] = w
    order = 1
    for w in constraints.values():
        if not w.residue.is_zero or not w.value.is_zero:
            order = w.residue.modulus.ell
            break
    return GWHandle(space, constraints, order)


def glue_check(psi: SplittingCharacter, z: str) -> bool:
    """Do the two local data of psi at z agree as one twisted character?

    The sides are adjusted by the certificate coefficients recorded for z
    (each side by the coefficient on the other side's equation, zero without
    a certificate); they glue iff the residues match and the adjusted
    unramified parts are equal.
    """
    sides = sorted(cid for cid, comp in psi.components.items() if z in comp.locals)
    if len(sides) != 2:
        raise MissingLocal(z)
    wa = psi.components[sides[0]].locals[z]
    wb = psi.components[sides[1]].locals[z]
    ka = kb = zero(psi.modulus)
    for cert in psi.certificates:
        if cert.point == z:
            if sides[0] in cert.coefficients:
                ka = cert.coefficients[sides[0]][1]
            if sides[1] in cert.coefficients:
                kb = cert.coefficients[sides[1]][1]
            break
    if wa.residue != wb.residue:
        return False
    return wa.value - scale(wa.residue, kb) == wb.value - scale(wb.residue, ka)


def _locations_of(m: Model, cid: str) -> list[str]:
    locs = {pid for pid, _ in m.adjacency[cid]}
    locs.update(w.label for w in m.markers if w.component == cid)
    return sorted(locs)


def _ram_pieces(m: Model, ram: set[str]) -> dict[str, str]:
    """Component -> the least member of its connected ramified piece."""
    piece: dict[str, str] = {}
    for root in sorted(ram):
        if root in piece:
            continue
        queue = deque([root])
        piece[root] = root
        while queue:
            cur = queue.popleft()
            for _, other in m.adjacency[cur]:
                if other in ram and other not in piece:
                    piece[other] = root
                    queue.append(other)
    return piece


def _build_character(rd: RamificationData, order=None) -> SplittingCharacter:
    m = rd.model
    mod = rd.modulus
    one = Scalar(1, mod)
    ram = set(rd.ram_verticals)
    multipliers: dict[str, Scalar] = {}
    entry_rules: dict[str, Rule] = {}
    step_rules: dict[str, dict[str, Rule]] = {cid: {} for cid in m.component_ids}
    queue: deque[str] = deque()

    if ram:
        dec = decompose(m, ram)
        cyclic = sorted(
            {c for cl in dec.clusters for c in cl}
            | {c for path in dec.connecting_paths for c in path}
        )
        if order is not None and cyclic:
            raise ValueError("an explicit order needs a cycle-free ramified set")
        # clusters and connecting paths take psi = sign * theta from the
        # bipartition; without signs they go through the generic walk, whose
        # consistency checks cover the cycles
        if all(m.comp_by_id[cid].sign in (1, -1) for cid in cyclic):
            for cid in cyclic:
                sign = m.comp_by_id[cid].sign
                multipliers[cid] = Scalar(sign, mod)
                entry_rules[cid] = Rule("ColdGlue", sign=sign)
                queue.append(cid)

    def constrain(cur: str, pid: str, other: str) -> None:
        c = classify_point(rd, pid)
        if c.kind == "hot":
            raise HotPointEncountered(pid)
        w_cur, w_oth = rd.local(cur, pid), rd.local(other, pid)
        if c.kind == "cold":
            required = -multipliers[cur]
            rule = Rule("I", sign=-1)
        elif w_cur.value.is_zero and w_oth.value.is_zero:
            if other in multipliers:
                return  # a vanishing pairing constrains nothing
            required = multipliers[cur]
            rule = Rule("II", n=required)
        else:
            n = solve_ratio(scale(multipliers[cur], w_cur.value), w_oth.value)
            if n is None:
                raise RatioAbsent(pid)
            if n.is_zero:
                raise HotPointEncountered(pid)
            required = n
            rule = Rule("II", n=n)
        if other in multipliers:
            if multipliers[other] != required:
                raise ConflictingConstraints(pid)
            return
        multipliers[other] = required
        entry_rules[other] = rule
        step_rules[other][pid] = rule
        queue.append(other)

    if order is not None:
        order = tuple(order)
        if sorted(order) != sorted(ram):
            raise ValueError("order must list every ramified component exactly once")
        pieces = _ram_pieces(m, ram)
        for cid in order:
            constraints = sorted(
                (pid, other) for pid, other in m.adjacency[cid] if other in multipliers
            )
            if constraints:
                for pid, other in constraints:
                    constrain(other, pid, cid)
            elif any(pieces[cid] == pieces[done] for done in multipliers):
                raise ValueError(f"{cid} does not meet a processed component")
            else:
                multipliers[cid] = one
                entry_rules[cid] = Rule("I", sign=1)
    else:
        while queue or len(multipliers) < len(ram):
            if not queue:
                root = min(ram - set(multipliers))
                multipliers[root] = one
                entry_rules[root] = Rule("I", sign=1)
                queue.append(root)
            cur = queue.popleft()
            for pid, other in m.adjacency[cur]:
                if other in ram:
                    constrain(cur, pid, other)

    certificates = tuple(
        cold_glue(rd, pid)
        for pid in rd.doubly_ramified_points()
        if classify_point(rd, pid).kind == "cold"
    )

    components: dict[str, ComponentCharacter] = {}
    for cid in sorted(ram):
        mu = multipliers[cid]
        locs: dict[str, LocalWitt] = {}
        rules: dict[str, Rule] = {}
        for loc in _locations_of(m, cid):
            w = rd.local(cid, loc)
            locs[loc] = LocalWitt(mu * w.residue, scale(mu, w.value))
            rules[loc] = step_rules[cid].get(loc, entry_rules[cid])
        components[cid] = ComponentCharacter(cid, mu, locs, rules)

    lifts: dict[str, GWHandle] = {}
    done = set(ram)
    for cid in sorted(m.component_ids - ram):
        locs = {}
        rules = {}
        for loc in _locations_of(m, cid):
            if loc in m.point_by_id:
                a, b = m.point_by_id[loc].incident
                other = b if a == cid else a
                if other in done:
                    locs[loc] = LocalWitt(Scalar(0, mod), components[other].locals[loc].value)
                    rules[loc] = Rule("A")
                else:
                    locs[loc] = rd.zero_witt()
                    rules[loc] = Rule("B")
            else:
                h = m.horizontal_at(loc)
                if h is not None and h.id in rd.residues:
                    locs[loc] = LocalWitt(Scalar(0, mod), rd.local(h.id, loc).value)
                    rules[loc] = Rule("C")
                else:
                    locs[loc] = rd.zero_witt()
                    rules[loc] = Rule("GW-fill")
        components[cid] = ComponentCharacter(cid, None, locs, rules)
        lifts[cid] = grunwald_wang_lift(m.comp_by_id[cid].residue_field, locs)
        done.add(cid)

    return SplittingCharacter(mod, components, certificates, lifts)


def assign_tree(m: Model, rd: RamificationData, order=None) -> SplittingCharacter:
    """Multiplier assignment for a cycle-free ramified set, plus the fill.

    Components are processed root-first (or in the given order, where each
    entry must meet an already processed component of its piece); a cold step
    negates the multiplier, a neutral step solves psi_cur(z) = n * theta_next(z).
    Unramified components copy earlier neighbours, zero out later ones, match
    ramified horizontals at their markers, and are closed by a lift handle.
    """
    _check_pair(m, rd)
    return _build_character(rd, order=order)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class CaseReport:
    divisor: str
    case: str
    e: int
    residue_killed: bool
    trace: str


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple[CaseReport, ...]

    @property
    def passed(self) -> bool:
        return all(e.residue_killed for e in self.entries)


def verify_splitting(m: Model, rd: RamificationData, psi: SplittingCharacter) -> VerificationReport:
    """Check divisor by divisor that psi kills the restricted class.

    Verticals need a unit global marker (cases a/i/ii); a horizontal is
    killed by ramification of psi at its marker (b/iii, e = l), by exact
    equality on an unramified host (c/iv), or by lying on the line of the
    host's value on a ramified host (d/v).  Letter cases apply when no
    cluster machinery was used, roman numerals otherwise.
    """
    _check_pair(m, rd)
    general = any(
        rule.kind == "ColdGlue" for comp in psi.components.values() for rule in comp.rules.values()
    )
    ram_v = set(rd.ram_verticals)
    entries: list[CaseReport] = []
    for div in sorted(rd.residues):
        if div in ram_v:
            comp = psi.components.get(div)
            if general:
                cluster = comp is not None and any(r.kind == "ColdGlue" for r in comp.rules.values())
                case = "ii" if cluster else "i"
            else:
                case = "a"
            ok = comp is not None and comp.global_marker is not None and not comp.global_marker.is_zero
            text = (
                "psi restricts to a unit multiple of theta"
                if ok
                else "no unit global marker for the component"
            )
            entries.append(CaseReport(div, case, 1, ok, text))
            continue
        label = m.horizontal_by_id[div].location
        host = m.marker_by_label[label].component
        t = rd.local(div, label).value
        host_comp = psi.components.get(host)
        w = host_comp.locals.get(label) if host_comp is not None else None
        if w is None:
            case = ("v" if host in ram_v else "iv") if general else ("d" if host in ram_v else "c")
            entries.append(CaseReport(div, case, 1, False, "no local datum at the marker"))
        elif not w.residue.is_zero:
            entries.append(
                CaseReport(
                    div,
                    "iii" if general else "b",
                    rd.modulus.ell,
                    True,
                    "psi is ramified along the divisor; degree l kills the restriction",
                )
            )
        elif host not in ram_v:
            ok = w.value == t
            entries.append(
                CaseReport(
                    div,
                    "iv" if general else "c",
                    1,
                    ok,
                    "the marker value matches the divisor" if ok else "marker value differs",
                )
            )
        else:
            ok = rd.local(host, label).residue.is_zero and same_line(w.value, t)
            entries.append(
                CaseReport(
                    div,
                    "v" if general else "d",
                    1,
                    ok,
                    "host line matches the divisor" if ok else "line mismatch at the marker",
                )
            )
    return VerificationReport(tuple(entries))


# ---------------------------------------------------------------------------
# the pipeline


def split(
    m: Model, rd: RamificationData, *, even_padding: bool = False
) -> tuple[SplittingCharacter, VerificationReport, tuple[TraceEntry, ...]]:
    """Build and verify a splitting character for validated residue data.

    Raises InvalidInput on validation failures and IndexTooLarge with the
    first hot location when the criterion reports index l^2.  Otherwise the
    model is made acceptable, ramified cycles are broken, the character is
    assigned and verified; with even_padding an extra marker blow-up evens
    out an odd trace.
    """
    _check_pair(m, rd)
    violations = validate_model(m)
    if violations:
        raise InvalidInput(violations)
    violations = validate_reciprocity(rd)
    if violations:
        raise InvalidInput(violations)
    report = index_criterion(rd)
    if report.hot_witness is not None:
        raise IndexTooLarge(report.hot_witness, report)

    trace: list[TraceEntry] = []
    _, rd, t = make_acceptable(m, rd)
    trace += t
    _, rd, t = reduce_betti(rd.model, rd)
    trace += t
    _, rd, t = make_acceptable(rd.model, rd)
    trace += t
    if even_padding and len(trace) % 2:
        taken = set(rd.model.point_by_id) | set(rd.model.marker_by_label)
        label, k = "pad0", 0
        while label in taken:
            k += 1
            label = f"pad{k}"
        rd = _with_pad_marker(rd, label)
        rd, eid = blowup_residue(rd, label, "marker")
        trace.append(TraceEntry(label, "padding", "marker", eid))

    psi = _build_character(rd)
    verification = verify_splitting(rd.model, rd, psi)
    return psi, verification, tuple(trace)
