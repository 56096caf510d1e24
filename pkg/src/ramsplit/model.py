"""Decorated dual-graph models of the closed fiber of a regular relative curve.

Vertices are vertical components, edges are singular points (every singular
point has multiplicity two), and horizontal data is carried by distinguished
divisors attached either at a singular point or at a marked nonsingular
location on a component.  Models are immutable values; surgery returns new
models.

The dual graph is a multigraph: two components may meet at several points,
and a double edge counts as a cycle of length two.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter, deque
from dataclasses import dataclass, replace
from functools import cached_property

from .charalg import PrimeModulus


class UnknownComponent(KeyError):
    pass


class UnknownLocation(KeyError):
    pass


class NotSingular(ValueError):
    pass


COEFF_MARKERS = ("unit", "nonunit", "divisible")


@dataclass(frozen=True, order=True)
class Coefficient:
    """Local-equation coefficient reduced to the three-valued information the
    regularity criteria consume, plus an optional symbolic unit label."""

    marker: str
    label: str = ""

    def __post_init__(self) -> None:
        if self.marker not in COEFF_MARKERS:
            raise ValueError(f"coefficient marker must be one of {COEFF_MARKERS}")


@dataclass(frozen=True)
class VerticalComponent:
    id: str
    residue_field: str
    kind: str = "original"
    sign: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("original", "exceptional"):
            raise ValueError("kind must be 'original' or 'exceptional'")
        if self.sign not in (None, 1, -1):
            raise ValueError("sign must be +1, -1 or None")


@dataclass(frozen=True)
class SingularPoint:
    id: str
    incident: tuple[str, str]
    residue_field: str

    def __post_init__(self) -> None:
        pair = tuple(sorted(self.incident))
        if pair != tuple(self.incident):
            object.__setattr__(self, "incident", pair)


@dataclass(frozen=True)
class Marker:
    """A marked nonsingular closed point on a component."""

    component: str
    label: str
    residue_field: str


@dataclass(frozen=True)
class DistinguishedDivisor:
    """A horizontal prime divisor attached at exactly one location.

    At a singular point the divisor carries the pair of local-equation
    coefficients (transversality data); at a marker it carries none.
    """

    id: str
    residue_field: str
    at_point: str | None = None
    at_marker: str | None = None
    coefficients: tuple[Coefficient, Coefficient] | None = None

    @property
    def location(self) -> str | None:
        if (self.at_point is None) == (self.at_marker is None):
            return None
        return self.at_point if self.at_point is not None else self.at_marker


@dataclass(frozen=True)
class Model:
    modulus: PrimeModulus
    components: tuple[VerticalComponent, ...]
    points: tuple[SingularPoint, ...]
    horizontals: tuple[DistinguishedDivisor, ...]
    markers: tuple[Marker, ...]

    @classmethod
    def make(cls, modulus, components=(), points=(), horizontals=(), markers=()) -> "Model":
        return cls(
            modulus,
            tuple(sorted(components, key=lambda c: c.id)),
            tuple(sorted(points, key=lambda p: p.id)),
            tuple(sorted(horizontals, key=lambda h: h.id)),
            tuple(sorted(markers, key=lambda w: (w.component, w.label))),
        )

    @cached_property
    def comp_by_id(self) -> dict[str, VerticalComponent]:
        return {c.id: c for c in self.components}

    @cached_property
    def point_by_id(self) -> dict[str, SingularPoint]:
        return {p.id: p for p in self.points}

    @cached_property
    def marker_by_label(self) -> dict[str, Marker]:
        return {w.label: w for w in self.markers}

    @cached_property
    def horizontal_by_id(self) -> dict[str, DistinguishedDivisor]:
        return {h.id: h for h in self.horizontals}

    @cached_property
    def component_ids(self) -> frozenset[str]:
        return frozenset(self.comp_by_id)

    @cached_property
    def adjacency(self) -> dict[str, tuple[tuple[str, str], ...]]:
        """Component id -> sorted (point id, other component id) pairs."""
        adj: dict[str, list[tuple[str, str]]] = {c.id: [] for c in self.components}
        for p in self.points:
            a, b = p.incident
            if a in adj and b in adj:
                adj[a].append((p.id, b))
                if a != b:
                    adj[b].append((p.id, a))
        return {cid: tuple(sorted(pairs)) for cid, pairs in adj.items()}

    def incident_at(self, location: str) -> tuple[str, ...]:
        """Component ids meeting at a point id or marker label."""
        if location in self.point_by_id:
            return self.point_by_id[location].incident
        if location in self.marker_by_label:
            return (self.marker_by_label[location].component,)
        raise UnknownLocation(location)

    def location_space(self, location: str) -> str:
        if location in self.point_by_id:
            return self.point_by_id[location].residue_field
        if location in self.marker_by_label:
            return self.marker_by_label[location].residue_field
        raise UnknownLocation(location)

    def horizontal_at(self, location: str) -> DistinguishedDivisor | None:
        for h in self.horizontals:
            if h.location == location:
                return h
        return None


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    detail: str = ""


def validate_model(m: Model) -> list[Violation]:
    out: list[Violation] = []

    for label, ids in (
        ("component", [c.id for c in m.components]),
        ("point", [p.id for p in m.points]),
        ("horizontal", [h.id for h in m.horizontals]),
        ("marker", [w.label for w in m.markers]),
    ):
        seen: set[str] = set()
        for i in ids:
            if i in seen:
                out.append(Violation("DuplicateId", i, f"duplicate {label} id"))
            seen.add(i)
    point_ids = {p.id for p in m.points}
    for w in m.markers:
        if w.label in point_ids:
            out.append(Violation("DuplicateId", w.label, "marker label collides with point id"))

    for p in m.points:
        a, b = p.incident
        if a == b:
            out.append(Violation("SelfIntersection", p.id, f"both branches on {a}"))
        for cid in (a, b):
            if cid not in m.component_ids:
                out.append(Violation("UnknownComponent", p.id, f"no component {cid}"))
    for w in m.markers:
        if w.component not in m.component_ids:
            out.append(Violation("UnknownComponent", w.label, f"no component {w.component}"))

    used_locations: set[str] = set()
    for h in m.horizontals:
        loc = h.location
        if loc is None:
            out.append(Violation("BadLocation", h.id, "needs exactly one of at_point/at_marker"))
            continue
        if h.at_point is not None:
            if h.at_point not in m.point_by_id:
                out.append(Violation("UnknownLocation", h.id, f"no point {h.at_point}"))
            if h.coefficients is None:
                out.append(Violation("MissingCoefficients", h.id, "singular point needs the coefficient pair"))
            elif any(c.marker != "unit" for c in h.coefficients):
                out.append(Violation("NonTransverse", h.id, "coefficients at a singular point must be units"))
        else:
            if h.at_marker not in m.marker_by_label:
                out.append(Violation("UnknownLocation", h.id, f"no marker {h.at_marker}"))
            if h.coefficients is not None:
                out.append(Violation("SpuriousCoefficients", h.id, "coefficients only make sense at a singular point"))
        if loc in used_locations:
            out.append(Violation("DuplicateLocation", h.id, f"second divisor at {loc}"))
        used_locations.add(loc)

    if not m.components:
        out.append(Violation("Disconnected", "", "empty model"))
    else:
        reached = _closure(m, next(iter(sorted(m.component_ids))))
        for cid in sorted(m.component_ids - reached):
            out.append(Violation("Disconnected", cid, "not reachable from the rest of the fiber"))
    return out


def _closure(m: Model, root: str) -> frozenset[str]:
    seen = {root}
    dq = deque([root])
    while dq:
        u = dq.popleft()
        for _, w in m.adjacency[u]:
            if w not in seen:
                seen.add(w)
                dq.append(w)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# Betti numbers


def _check_subgraph(m: Model, subgraph) -> frozenset[str]:
    comps = m.component_ids if subgraph is None else frozenset(subgraph)
    for cid in sorted(comps - m.component_ids):
        raise UnknownComponent(cid)
    return comps


def betti(m: Model, subgraph=None) -> int:
    """E - V + N of the induced subgraph (N = its connected components)."""
    comps = _check_subgraph(m, subgraph)
    edges = [p for p in m.points if p.incident[0] in comps and p.incident[1] in comps]
    parent = {c: c for c in comps}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in edges:
        parent[find(p.incident[0])] = find(p.incident[1])
    n = len({find(c) for c in comps})
    return len(edges) - len(comps) + n


# ---------------------------------------------------------------------------
# two-coloring


@dataclass(frozen=True)
class OddCycleWitness:
    points: tuple[str, ...]


def _color_forest(m: Model):
    """Deterministic BFS coloring.

    Returns (color, parent, conflicts): parent maps a component to its
    (parent component, via point) or None at roots; conflicts lists the
    non-tree points whose endpoints got the same color, in sorted order.
    """
    color: dict[str, int] = {}
    parent: dict[str, tuple[str, str] | None] = {}
    tree_points: set[str] = set()
    for root in sorted(m.component_ids):
        if root in color:
            continue
        color[root] = 1
        parent[root] = None
        dq = deque([root])
        while dq:
            u = dq.popleft()
            for pid, w in m.adjacency[u]:
                if w not in color:
                    color[w] = -color[u]
                    parent[w] = (u, pid)
                    tree_points.add(pid)
                    dq.append(w)
    conflicts = sorted(
        p.id
        for p in m.points
        if p.id not in tree_points and color[p.incident[0]] == color[p.incident[1]]
    )
    return color, parent, tree_points, conflicts


def _witness_cycle(m: Model, parent, conflict: str) -> tuple[str, ...]:
    u, v = m.point_by_id[conflict].incident

    def chain(x: str) -> list[tuple[str, str | None]]:
        out = []
        while parent[x] is not None:
            p, e = parent[x]
            out.append((x, e))
            x = p
        out.append((x, None))
        return out

    cu, cv = chain(u), chain(v)
    index_u = {comp: i for i, (comp, _) in enumerate(cu)}
    j = next(i for i, (comp, _) in enumerate(cv) if comp in index_u)
    i = index_u[cv[j][0]]
    up = [e for _, e in cu[:i]]
    down = [e for _, e in reversed(cv[:j])]
    return tuple(up + down + [conflict])


def two_color(m: Model):
    """A +/- assignment with adjacent components opposite, or an odd cycle.

    Deterministic: the lowest-id component of each connected piece gets +.
    """
    color, parent, _, conflicts = _color_forest(m)
    if conflicts:
        return OddCycleWitness(_witness_cycle(m, parent, conflicts[0]))
    return color


def with_signs(m: Model, assignment: dict[str, int]) -> Model:
    comps = [replace(c, sign=assignment.get(c.id)) for c in m.components]
    return Model.make(m.modulus, comps, m.points, m.horizontals, m.markers)


def repair_bipartite(m: Model) -> tuple[Model, tuple[str, ...]]:
    """Subdivide edges until the dual graph is bipartite.

    One fixed coloring forest is computed per pass; subdividing each of its
    same-color non-tree points flips exactly that point's own cycle-space
    coordinate of the parity functional, so a single pass of at most beta
    subdivisions reaches a bipartite graph.
    """
    blown: list[str] = []
    while True:
        _, _, _, conflicts = _color_forest(m)
        if not conflicts:
            return m, tuple(blown)
        for pid in conflicts:
            m, _ = blow_up(m, pid)
            blown.append(pid)


def bipartite_repair_plan(m: Model) -> tuple[tuple[str, tuple[str, ...]], ...]:
    """Conflict points of one coloring forest, each with its stand-ins.

    For every conflict point the second entry lists the points lying on that
    conflict's fundamental cycle and on no other fundamental cycle: subdividing
    any one of them flips exactly the same parity coordinate, so a caller may
    pick whichever suits it.  The conflict point itself always qualifies.
    """
    color, parent, tree_points, conflicts = _color_forest(m)
    if not conflicts:
        return ()
    membership: Counter[str] = Counter()
    cycles: dict[str, frozenset[str]] = {}
    for p in m.points:
        if p.id in tree_points:
            continue
        cyc = frozenset(_witness_cycle(m, parent, p.id))
        cycles[p.id] = cyc
        membership.update(cyc)
    return tuple(
        (pid, tuple(sorted(e for e in cycles[pid] if membership[e] == 1)))
        for pid in conflicts
    )


# ---------------------------------------------------------------------------
# decomposition into trees, clusters, connecting paths and tails

GraphEdge = tuple[str, str, str]  # (edge id, endpoint, endpoint)


def chordless_graph_cycles(vertices, edges: list[GraphEdge]) -> list[frozenset[str]]:
    """Chordless cycles of a multigraph, as edge-id sets.

    Candidates are the nonzero elements of the cycle space (combinations of
    fundamental cycles of a BFS forest) that happen to be single cycles.  A
    chord is an off-cycle edge joining two non-consecutive cycle vertices;
    parallel copies of cycle edges are not chords.
    """
    verts = sorted(vertices)
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in verts}
    by_id: dict[str, tuple[str, str]] = {}
    for eid, u, v in edges:
        by_id[eid] = (u, v)
        adj[u].append((eid, v))
        if u != v:
            adj[v].append((eid, u))
    for v in adj:
        adj[v].sort()

    parent: dict[str, tuple[str, str] | None] = {}
    tree: set[str] = set()
    for root in verts:
        if root in parent:
            continue
        parent[root] = None
        dq = deque([root])
        while dq:
            u = dq.popleft()
            for eid, w in adj[u]:
                if w not in parent:
                    parent[w] = (u, eid)
                    tree.add(eid)
                    dq.append(w)
    nontree = [e for e in edges if e[0] not in tree]
    beta = len(nontree)
    if beta == 0:
        return []
    if beta > 24:
        raise ValueError(f"cycle space dimension {beta} is too large to enumerate")

    order = {eid: i for i, (eid, _, _) in enumerate(edges)}

    def path_edges(x: str) -> set[str]:
        out: set[str] = set()
        while parent[x] is not None:
            p, e = parent[x]
            out.add(e)
            x = p
        return out

    fundamentals: list[int] = []
    for eid, u, v in nontree:
        ids = path_edges(u) ^ path_edges(v) | {eid}
        mask = 0
        for e in ids:
            mask |= 1 << order[e]
        fundamentals.append(mask)

    eids = [e[0] for e in edges]
    combos = [0] * (1 << beta)
    found: list[frozenset[str]] = []
    for c in range(1, 1 << beta):
        low = c & -c
        combos[c] = combos[c ^ low] ^ fundamentals[low.bit_length() - 1]
        mask = combos[c]
        cyc = [eids[i] for i in range(len(eids)) if mask >> i & 1]
        deg: dict[str, int] = {}
        for e in cyc:
            for x in by_id[e]:
                deg[x] = deg.get(x, 0) + 1
        if any(d != 2 for d in deg.values()):
            continue
        cyc_verts = set(deg)
        local: dict[str, list[str]] = {x: [] for x in cyc_verts}
        for e in cyc:
            u, v = by_id[e]
            local[u].append(v)
            local[v].append(u)
        stack, seen = [next(iter(sorted(cyc_verts)))], set()
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(local[x])
        if seen != cyc_verts:
            continue
        pairs = {frozenset(by_id[e]) for e in cyc}
        cset = set(cyc)
        if any(
            e not in cset and u in cyc_verts and v in cyc_verts and u != v
            and frozenset((u, v)) not in pairs
            for e, u, v in edges
        ):
            continue
        found.append(frozenset(cyc))
    return found


def classify_graph(vertices, edges: list[GraphEdge]) -> dict:
    """Cycle/cluster/tail/tree taxonomy of a multigraph.

    Keys: cycles (edge-id frozensets), clusters / tails / connecting / trees
    (vertex frozensets), point_class (edge id -> class), cycle_vertices.
    """
    vset = set(vertices)
    by_id = {eid: (u, v) for eid, u, v in edges}
    cycles = chordless_graph_cycles(vset, edges)
    cycle_edges = set().union(*cycles) if cycles else set()
    cycle_verts = {x for e in cycle_edges for x in by_id[e]}

    cyc_verts = [frozenset(x for e in c for x in by_id[e]) for c in cycles]
    parent = list(range(len(cycles)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(cycles)), 2):
        if cyc_verts[i] & cyc_verts[j]:
            parent[find(i)] = find(j)
    members: dict[int, set[str]] = {}
    for i in range(len(cycles)):
        members.setdefault(find(i), set()).update(cyc_verts[i])
    clusters = [frozenset(g) for g in members.values()]
    cluster_of = {v: k for k, cl in enumerate(clusters) for v in cl}

    rest = vset - cycle_verts
    pieces: list[frozenset[str]] = []
    seen: set[str] = set()
    adj: dict[str, set[str]] = {v: set() for v in rest}
    for _, u, v in edges:
        if u in rest and v in rest:
            adj[u].add(v)
            adj[v].add(u)
    for v in sorted(rest):
        if v in seen:
            continue
        stack, part = [v], set()
        while stack:
            x = stack.pop()
            if x in part:
                continue
            part.add(x)
            stack.extend(adj[x] - part)
        seen |= part
        pieces.append(frozenset(part))

    piece_of = {v: p for p in pieces for v in p}
    piece_kind: dict[frozenset[str], str] = {}
    for p in pieces:
        touched = {
            cluster_of[w]
            for _, u, v in edges
            for x, w in ((u, v), (v, u))
            if x in p and w in cluster_of
        }
        piece_kind[p] = (
            "isolated-tree" if not touched else "tail" if len(touched) == 1 else "connecting"
        )

    point_class: dict[str, str] = {}
    for eid, u, v in edges:
        if eid in cycle_edges:
            point_class[eid] = "cycle"
        elif u in piece_of or v in piece_of:
            point_class[eid] = piece_kind[piece_of.get(u) or piece_of.get(v)]
        elif cluster_of[u] != cluster_of[v]:
            point_class[eid] = "connecting"
        else:
            raise RuntimeError(f"off-cycle edge {eid} inside a single cluster")

    return {
        "cycles": cycles,
        "clusters": clusters,
        "tails": [p for p in pieces if piece_kind[p] == "tail"],
        "connecting": [p for p in pieces if piece_kind[p] == "connecting"],
        "trees": [p for p in pieces if piece_kind[p] == "isolated-tree"],
        "point_class": point_class,
        "cycle_vertices": frozenset(cycle_verts),
    }


@dataclass(frozen=True)
class Decomposition:
    isolated_trees: tuple[tuple[str, ...], ...]
    clusters: tuple[tuple[str, ...], ...]
    connecting_paths: tuple[tuple[str, ...], ...]
    tails: tuple[tuple[str, ...], ...]
    cycles: tuple[tuple[str, ...], ...]
    point_class: dict[str, str]

    @property
    def cycle_components(self) -> frozenset[str]:
        return frozenset(c for cl in self.clusters for c in cl)


def decompose(m: Model, ram) -> Decomposition:
    """Partition the ramified vertical part into the cycle vocabulary."""
    comps = _check_subgraph(m, ram)
    edges = [
        (p.id, p.incident[0], p.incident[1])
        for p in m.points
        if p.incident[0] in comps and p.incident[1] in comps
    ]
    raw = classify_graph(comps, edges)

    def pack(groups) -> tuple[tuple[str, ...], ...]:
        return tuple(sorted(tuple(sorted(g)) for g in groups))

    return Decomposition(
        isolated_trees=pack(raw["trees"]),
        clusters=pack(raw["clusters"]),
        connecting_paths=pack(raw["connecting"]),
        tails=pack(raw["tails"]),
        cycles=pack(raw["cycles"]),
        point_class=raw["point_class"],
    )


# ---------------------------------------------------------------------------
# blow-up surgery


def _fresh_exceptional_id(m: Model) -> str:
    taken = m.component_ids
    n = 1 + max(
        (int(g.group(1)) for cid in taken if (g := re.fullmatch(r"E(\d+)", cid))),
        default=0,
    )
    while f"E{n}" in taken:
        n += 1
    return f"E{n}"


def _fresh(base: str, taken: set[str]) -> str:
    fresh = base
    while fresh in taken:
        fresh += "x"
    return fresh


def blow_up(m: Model, at: str) -> tuple[Model, str]:
    """Blow up a singular point (edge subdivision) or a marker (pendant).

    The exceptional component gets a fresh function-field space; the new
    singular points keep the residue field of the blown-up location.
    Horizontal divisors at the location are re-attached to the exceptional
    component at a fresh marker.  Signs are invalidated.
    """
    eid = _fresh_exceptional_id(m)
    comps = [replace(c, sign=None) for c in m.components]
    comps.append(VerticalComponent(eid, f"k({eid})", kind="exceptional"))
    taken_ids = {p.id for p in m.points} | {w.label for w in m.markers}

    if at in m.point_by_id:
        z = m.point_by_id[at]
        space = z.residue_field
        points = [p for p in m.points if p.id != at]
        taken_ids.discard(at)
        for cid in z.incident:
            pid = _fresh(f"{eid}:{cid}", taken_ids)
            taken_ids.add(pid)
            points.append(SingularPoint(pid, (eid, cid), space))
        markers = list(m.markers)
        moved = [h for h in m.horizontals if h.at_point == at]
    elif at in m.marker_by_label:
        w = m.marker_by_label[at]
        space = w.residue_field
        pid = _fresh(f"{eid}:{w.component}", taken_ids)
        taken_ids.add(pid)
        points = list(m.points) + [SingularPoint(pid, (eid, w.component), space)]
        markers = [k for k in m.markers if k.label != at]
        taken_ids.discard(at)
        moved = [h for h in m.horizontals if h.at_marker == at]
    else:
        raise UnknownLocation(at)

    horizontals = [h for h in m.horizontals if h not in moved]
    for k, h in enumerate(sorted(moved, key=lambda h: h.id)):
        label = _fresh(f"{eid}:m{k}", taken_ids)
        taken_ids.add(label)
        markers.append(Marker(eid, label, space))
        horizontals.append(replace(h, at_point=None, at_marker=label, coefficients=None))

    return Model.make(m.modulus, comps, points, horizontals, markers), eid


# ---------------------------------------------------------------------------
# distinguished-divisor regularity flags


@dataclass(frozen=True)
class DistinguishedFlags:
    regular: bool
    horizontal: bool
    transverse: bool


def check_distinguished(m: Model, coeffs, location: str) -> DistinguishedFlags:
    """Evaluate the regularity criteria on a symbolic coefficient pair.

    regular: some coefficient is a unit (the pair generates the local ring);
    horizontal: neither coefficient is divisible by the other component's
    equation (the divisor contains no vertical component);
    transverse: both are units.
    """
    if location not in m.point_by_id:
        raise NotSingular(location)
    marks = tuple(c.marker if isinstance(c, Coefficient) else c for c in coeffs)
    if len(marks) != 2 or any(mk not in COEFF_MARKERS for mk in marks):
        raise ValueError(f"need a pair of markers from {COEFF_MARKERS}")
    return DistinguishedFlags(
        regular="unit" in marks,
        horizontal="divisible" not in marks,
        transverse=marks == ("unit", "unit"),
    )


# ---------------------------------------------------------------------------
# DOT export


_EDGE_COLORS = {"hot": "red", "cold": "blue", "neutral": "gray"}


def export_dot(m: Model, decorations: dict | None = None) -> str:
    """Deterministic DOT text: components as nodes, singular points as edges.

    decorations: optional {"ram": set of component ids, "edge_class":
    {point id: hot|cold|neutral}}.
    """
    decorations = decorations or {}
    ram = decorations.get("ram", set())
    edge_class = decorations.get("edge_class", {})
    lines = ["graph model {"]
    for c in m.components:
        sign = {1: "+", -1: "-", None: "."}[c.sign]
        badge = " ram" if c.id in ram else ""
        lines.append(f'  "{c.id}" [label="{c.id} {sign} {c.kind}{badge}"];')
    for p in m.points:
        a, b = p.incident
        attrs = [f'label="{p.id}"']
        if p.id in edge_class:
            attrs.append(f'color="{_EDGE_COLORS[edge_class[p.id]]}"')
        lines.append(f'  "{a}" -- "{b}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
