"""Ramification data: reciprocity checks, point classification, index criterion,
and the random instance generator."""

from __future__ import annotations

from dataclasses import replace

import pytest

from factories import build_model, cls, rd_make, sc, witt
from ramsplit.model import betti, blow_up, validate_model
from ramsplit.ramification import (
    InfeasibleParams,
    LocalWitt,
    NotDoublyRamified,
    classify_point,
    generate_random,
    index_criterion,
    validate_reciprocity,
)


def codes(violations):
    return {v.code for v in violations}


def edge_model(ell=5):
    return build_model(ell, [("z0", "c0", "c1")])


def marker_model(ell=5):
    return build_model(
        ell,
        [("z0", "c0", "c1")],
        markers=[("c0", "w0")],
        horizontals=[{"id": "h0", "residue_field": "k(h0)", "at_marker": "w0"}],
    )


# ---------------------------------------------------------------------------
# validate_reciprocity


def test_reciprocity_balanced_cold_edge():
    m = edge_model()
    rd = rd_make(m, {"c0": {"z0": witt(5, 2)}, "c1": {"z0": witt(5, 3)}})
    assert validate_reciprocity(rd) == []


def test_reciprocity_unbalanced():
    m = edge_model()
    rd = rd_make(m, {"c0": {"z0": witt(5, 1)}, "c1": {"z0": witt(5, 1)}})
    assert "UnbalancedResidues" in codes(validate_reciprocity(rd))


def test_reciprocity_single_component_residue_must_vanish():
    m = edge_model()
    rd = rd_make(m, {"c0": {"z0": witt(5, 2)}})
    assert "StrayResidue" in codes(validate_reciprocity(rd))
    rd2 = rd_make(m, {"c0": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 1}))}})
    assert validate_reciprocity(rd2) == []


def test_reciprocity_horizontal_must_sit_at_marker():
    m = build_model(
        5,
        [("z0", "c0", "c1")],
        horizontals=[
            {
                "id": "h0",
                "residue_field": "k(h0)",
                "at_point": "z0",
                "coefficients": None,
            }
        ],
    )
    rd = rd_make(m, {"h0": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 1}))}})
    assert "HorizontalAtPoint" in codes(validate_reciprocity(rd))


def test_reciprocity_horizontal_shape():
    m = marker_model()
    ok = rd_make(m, {"h0": {"w0": witt(5, 0, cls(5, "k(w0)", {"g1": 2}))}})
    assert validate_reciprocity(ok) == []

    ramified_residue = rd_make(m, {"h0": {"w0": witt(5, 1, cls(5, "k(w0)", {"g1": 2}))}})
    assert "HorizontalResidue" in codes(validate_reciprocity(ramified_residue))

    wrong_location = rd_make(m, {"h0": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 2}))}})
    assert "BadLocals" in codes(validate_reciprocity(wrong_location))

    zero_value = rd_make(m, {"h0": {"w0": witt(5, 0)}})
    assert "ZeroCharacter" in codes(validate_reciprocity(zero_value))


def test_reciprocity_vertical_marker_residue_vanishes():
    m = marker_model()
    rd = rd_make(
        m,
        {
            "c0": {"w0": witt(5, 2)},
            "h0": {"w0": witt(5, 0, cls(5, "k(w0)", {"g1": 1}))},
        },
    )
    assert "StrayResidue" in codes(validate_reciprocity(rd))


def test_reciprocity_structural_checks():
    m = edge_model()
    unknown = rd_make(m, {"c9": {"z0": witt(5, 0)}})
    assert "UnknownDivisor" in codes(validate_reciprocity(unknown))

    foreign = rd_make(m, {"c0": {"nowhere": witt(5, 0)}})
    assert "BadLocals" in codes(validate_reciprocity(foreign))

    wrong_space = rd_make(
        m, {"c0": {"z0": witt(5, 0, cls(5, "k(elsewhere)", {"g1": 1}))}}
    )
    assert "SpaceMismatch" in codes(validate_reciprocity(wrong_space))


def test_reciprocity_omitted_character_flag():
    from ramsplit.ramification import RamificationData, ResidueCharacter

    m = edge_model()
    ch = ResidueCharacter("c0", {"z0": witt(5, 0)}, nonzero=False)
    rd = RamificationData(m.modulus, m, {"c0": ch})
    assert "OmittedCharacter" in codes(validate_reciprocity(rd))


# ---------------------------------------------------------------------------
# classify_point


def test_classify_cold():
    m = edge_model()
    rd = rd_make(m, {"c0": {"z0": witt(5, 2)}, "c1": {"z0": witt(5, 3)}})
    got = classify_point(rd, "z0")
    assert got.kind == "cold"
    assert got.divisors == ("c0", "c1")
    assert got.residues == (sc(5, 2), sc(5, 3))
    assert got.ratio is None


def test_classify_hot_independent_values():
    m = edge_model()
    rd = rd_make(
        m,
        {
            "c0": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 1}))},
            "c1": {"z0": witt(5, 0, cls(5, "k(z0)", {"g2": 1}))},
        },
    )
    assert classify_point(rd, "z0").kind == "hot"


def test_classify_neutral_with_ratio():
    m = edge_model()
    rd = rd_make(
        m,
        {
            "c0": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 2}))},
            "c1": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 3}))},
        },
    )
    got = classify_point(rd, "z0")
    assert got.kind == "neutral"
    assert got.ratio == sc(5, 4)


def test_classify_neutral_zero_values():
    m = edge_model()
    rd = rd_make(m, {"c0": {"z0": witt(5, 0)}, "c1": {"z0": witt(5, 0)}})
    got = classify_point(rd, "z0")
    assert got.kind == "neutral"
    assert got.ratio == sc(5, 1)


def test_classify_single_zero_value_is_hot():
    m = edge_model()
    v = cls(5, "k(z0)", {"g1": 1})
    for chars in (
        {"c0": {"z0": witt(5, 0, v)}, "c1": {"z0": witt(5, 0)}},
        {"c0": {"z0": witt(5, 0)}, "c1": {"z0": witt(5, 0, v)}},
    ):
        assert classify_point(rd_make(edge_model(), chars), "z0").kind == "hot"


def test_classify_swap_invariant():
    for chars in (
        {"c0": {"z0": witt(5, 2)}, "c1": {"z0": witt(5, 3)}},
        {
            "c0": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 2}))},
            "c1": {"z0": witt(5, 0, cls(5, "k(z0)", {"g1": 3}))},
        },
    ):
        m = edge_model()
        swapped = {
            "c0": chars["c1"],
            "c1": chars["c0"],
        }
        a = classify_point(rd_make(m, chars), "z0")
        b = classify_point(rd_make(m, swapped), "z0")
        assert a.kind == b.kind


def test_classify_marker_pairing():
    m = marker_model()
    host_value = cls(5, "k(w0)", {"g1": 1})
    neutral = rd_make(
        m,
        {
            "c0": {"z0": witt(5, 0), "w0": witt(5, 0, host_value)},
            "c1": {"z0": witt(5, 0)},
            "h0": {"w0": witt(5, 0, cls(5, "k(w0)", {"g1": 3}))},
        },
    )
    got = classify_point(neutral, "w0")
    assert got.kind == "neutral"
    assert got.divisors == ("c0", "h0")
    assert got.ratio == sc(5, 2)  # 1 = 2 * 3 mod 5

    hot = rd_make(
        m,
        {
            "c0": {"z0": witt(5, 0), "w0": witt(5, 0, host_value)},
            "c1": {"z0": witt(5, 0)},
            "h0": {"w0": witt(5, 0, cls(5, "k(w0)", {"g2": 3}))},
        },
    )
    assert classify_point(hot, "w0").kind == "hot"


def test_classify_not_doubly_ramified():
    m = marker_model()
    rd = rd_make(m, {"c0": {"z0": witt(5, 0)}})
    with pytest.raises(NotDoublyRamified):
        classify_point(rd, "z0")  # c1 unramified
    with pytest.raises(NotDoublyRamified):
        classify_point(rd, "w0")  # horizontal unramified
    with pytest.raises(NotDoublyRamified):
        classify_point(rd, "zz")  # unknown location

    unram_host = rd_make(m, {"h0": {"w0": witt(5, 0, cls(5, "k(w0)", {"g1": 1}))}})
    with pytest.raises(NotDoublyRamified):
        classify_point(unram_host, "w0")


# ---------------------------------------------------------------------------
# index_criterion


def triangle_rd(ell, kinds):
    """Triangle c0-c1-c2 with per-edge data: kinds maps point -> 'cold'|'hot'|'neutral'."""
    m = build_model(ell, [("z0", "c0", "c1"), ("z1", "c1", "c2"), ("z2", "c0", "c2")])
    chars = {c: {} for c in ("c0", "c1", "c2")}
    for pid, (a, b) in (("z0", ("c0", "c1")), ("z1", ("c1", "c2")), ("z2", ("c0", "c2"))):
        space = f"k({pid})"
        if kinds[pid] == "cold":
            chars[a][pid] = witt(ell, 2)
            chars[b][pid] = witt(ell, ell - 2)
        elif kinds[pid] == "hot":
            chars[a][pid] = witt(ell, 0, cls(ell, space, {"g1": 1}))
            chars[b][pid] = witt(ell, 0, cls(ell, space, {"g2": 1}))
        else:
            v = cls(ell, space, {"g1": 1})
            chars[a][pid] = witt(ell, 0, v)
            chars[b][pid] = witt(ell, 0, v)
    return rd_make(m, chars)


def test_index_all_cold_triangle():
    rd = triangle_rd(5, {"z0": "cold", "z1": "cold", "z2": "cold"})
    assert validate_reciprocity(rd) == []
    got = index_criterion(rd)
    assert got.bound == 5 and got.hot_witness is None and not got.unramified


def test_index_hot_witness_lowest_first():
    rd = triangle_rd(5, {"z0": "neutral", "z1": "hot", "z2": "hot"})
    got = index_criterion(rd)
    assert got.bound == 25
    assert got.hot_witness == "z1"


def test_index_empty_ramification():
    m = edge_model()
    rd = rd_make(m, {})
    got = index_criterion(rd)
    assert got.bound == 5 and got.unramified


def test_index_scans_markers_after_points():
    m = build_model(
        5,
        [("z0", "c0", "c1")],
        markers=[("c0", "w0")],
        horizontals=[{"id": "h0", "residue_field": "k(h0)", "at_marker": "w0"}],
    )
    rd = rd_make(
        m,
        {
            "c0": {"z0": witt(5, 0), "w0": witt(5, 0, cls(5, "k(w0)", {"g1": 1}))},
            "c1": {"z0": witt(5, 0)},
            "h0": {"w0": witt(5, 0, cls(5, "k(w0)", {"g2": 1}))},
        },
    )
    assert validate_reciprocity(rd) == []
    got = index_criterion(rd)
    assert got.bound == 25 and got.hot_witness == "w0"


def test_index_invariant_under_faraway_blow_up():
    m = build_model(5, [("z0", "c0", "c1"), ("z1", "c1", "c2"), ("z2", "c2", "c3")])
    rd = rd_make(m, {"c0": {"z0": witt(5, 2)}, "c1": {"z0": witt(5, 3)}})
    before = index_criterion(rd)
    m2, _ = blow_up(m, "z2")  # away from every ramified component
    after = index_criterion(replace(rd, model=m2))
    assert (before.bound, before.hot_witness) == (after.bound, after.hot_witness)


# ---------------------------------------------------------------------------
# generate_random


def every_pair_location(rd):
    """All doubly-ramified singular points and ramified-pair markers."""
    m = rd.model
    ram = set(rd.residues)
    out = [p.id for p in m.points if p.incident[0] in ram and p.incident[1] in ram]
    for h in m.horizontals:
        if h.id in ram and h.at_marker is not None:
            if m.marker_by_label[h.at_marker].component in ram:
                out.append(h.at_marker)
    return out


def test_generator_deterministic():
    a_model, a_rd = generate_random(17, ell=5, n_components=8, n_cycles=2)
    b_model, b_rd = generate_random(17, ell=5, n_components=8, n_cycles=2)
    assert a_model == b_model
    assert a_rd == b_rd


def test_generator_seed0_golden():
    m, rd = generate_random(0)
    assert [c.id for c in m.components] == [f"c{i}" for i in range(8)]
    assert [(p.id, p.incident) for p in m.points] == [
        ("z0", ("c0", "c1")),
        ("z1", ("c1", "c2")),
        ("z2", ("c0", "c3")),
        ("z3", ("c2", "c4")),
        ("z4", ("c4", "c5")),
        ("z5", ("c3", "c6")),
        ("z6", ("c3", "c7")),
        ("z7", ("c3", "c4")),
    ]
    assert [(w.component, w.label) for w in m.markers] == [("c1", "w1"), ("c7", "w0")]
    assert sorted(rd.residues) == [f"c{i}" for i in range(8)] + ["h0", "h1"]
    kinds = {
        loc: classify_point(rd, loc).kind
        for loc in rd.doubly_ramified_points() + rd.ramified_pair_markers()
    }
    assert kinds == {
        "z0": "cold",
        "z1": "neutral",
        "z2": "neutral",
        "z3": "cold",
        "z4": "cold",
        "z5": "neutral",
        "z6": "neutral",
        "z7": "cold",
        "w0": "neutral",
        "w1": "neutral",
    }


def test_generator_outputs_valid():
    for seed in range(150):
        m, rd = generate_random(seed, ell=3, n_components=7, n_cycles=1)
        assert validate_model(m) == []
        assert validate_reciprocity(rd) == []


def test_generator_hot_free_by_default():
    for seed in range(200):
        _, rd = generate_random(seed, ell=5, n_components=6, n_cycles=1)
        for loc in every_pair_location(rd):
            assert classify_point(rd, loc).kind != "hot"


def test_generator_plants_hot_when_allowed():
    hot_seen = 0
    for seed in range(50):
        _, rd = generate_random(seed, ell=5, n_components=6, n_cycles=1, hot_allowed=True)
        kinds = {classify_point(rd, loc).kind for loc in every_pair_location(rd)}
        hot_seen += "hot" in kinds
    assert hot_seen > 5


def test_generator_cycle_count_exact():
    for k in (0, 1, 2, 3):
        for seed in range(25):
            m, rd = generate_random(seed, ell=7, n_components=9, n_cycles=k)
            ram_verticals = set(rd.residues) & m.component_ids
            assert betti(m, ram_verticals) == k


def test_generator_cold_fraction_extremes():
    for seed in range(40):
        _, rd = generate_random(seed, ell=5, n_components=6, n_cycles=2, cold_fraction=1.0)
        for loc in every_pair_location(rd):
            got = classify_point(rd, loc)
            if loc in {p.id for p in rd.model.points}:
                assert got.kind == "cold"
    for seed in range(40):
        _, rd = generate_random(seed, ell=5, n_components=6, n_cycles=2, cold_fraction=0.0)
        for loc in every_pair_location(rd):
            assert classify_point(rd, loc).kind == "neutral"


def test_generator_infeasible_params():
    with pytest.raises(InfeasibleParams):
        generate_random(0, ell=5, n_components=0)
    with pytest.raises(InfeasibleParams):
        generate_random(0, ell=5, n_components=1, n_cycles=1)
    with pytest.raises(InfeasibleParams):
        generate_random(0, ell=5, n_components=4, n_cycles=-1)
    with pytest.raises(InfeasibleParams):
        generate_random(0, ell=5, n_components=4, cold_fraction=1.5)


def test_generator_respects_size_bounds():
    for seed in range(60):
        m, _ = generate_random(seed, ell=3, n_components=12, n_cycles=3)
        assert len(m.components) <= 12
        assert len(m.points) <= 20
