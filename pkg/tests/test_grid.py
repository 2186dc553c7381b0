import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catsim.errors import ConsistencyError, GeometryError, RuleParseError, UnsupportedRuleError
from catsim.grid import (
    PRESETS,
    Grid,
    Layout,
    LtlRule,
    NeighborhoodKind,
    apply_transition,
    fill_periodic_halo,
    format_ltl_rule,
    init_random,
    parse_ltl_rule,
    random_cells,
    splitmix64,
    splitmix64_array,
    transition_field,
)

from conftest import random_grid

GOL = parse_ltl_rule("R1,C2,M0,S2..3,B3..3,NM")


def test_parse_game_of_life():
    assert GOL == LtlRule(r=1, c=2, m=0, s1=2, s2=3, b1=3, b2=3, kind=NeighborhoodKind.MOORE)


def test_parse_bosco():
    rule = parse_ltl_rule("R5,C2,M0,S35..59,B34..45,NM")
    assert (rule.r, rule.m, rule.s1, rule.s2, rule.b1, rule.b2) == (5, 0, 35, 59, 34, 45)
    assert rule.kind is NeighborhoodKind.MOORE


def test_parse_von_neumann():
    rule = parse_ltl_rule("R3,C2,M1,S2..5,B3..4,NN")
    assert rule.kind is NeighborhoodKind.VON_NEUMANN and rule.m == 1


@pytest.mark.parametrize(
    "text, field",
    [
        ("R1,C2,M0,S2..3,B3..3,NX", "N"),
        ("R1,C2,M2,S2..3,B3..3,NM", "M"),
        ("R1,C2,M0,S2-3,B3..3,NM", "S"),
        ("R1,C2,M0,S2..3,B3,NM", "B"),
        ("Rx,C2,M0,S2..3,B3..3,NM", "R"),
        ("R1,C2,M0,S2..3,NM", "rule"),
        ("R1,C2,M0,S3..2,B3..3,NM", "S"),
        ("R1,C2,M0,S2..9,B3..3,NM", "S"),  # 9 > 8 neighbors without the center
    ],
)
def test_parse_errors_name_the_field(text, field):
    with pytest.raises(RuleParseError) as info:
        parse_ltl_rule(text)
    assert info.value.field == field


@pytest.mark.parametrize("text", ["R0,C2,M0,S0..0,B0..0,NM", "R17,C2,M0,S2..3,B3..3,NM",
                                  "R1,C3,M0,S2..3,B3..3,NM"])
def test_unsupported_rules(text):
    with pytest.raises(UnsupportedRuleError):
        parse_ltl_rule(text)


def test_count_limits_include_center_flag():
    LtlRule(r=1, s1=0, s2=9, b1=0, b2=9, m=1)
    LtlRule(r=2, s1=0, s2=8, b1=0, b2=8, m=0, kind=NeighborhoodKind.VON_NEUMANN)
    with pytest.raises(RuleParseError):
        LtlRule(r=2, s1=0, s2=9, b1=0, b2=0, m=0, kind=NeighborhoodKind.VON_NEUMANN)


def test_all_presets_valid():
    assert len(PRESETS) == 16
    assert sorted(p.rule.r for p in PRESETS.values()) == list(range(1, 17))
    assert PRESETS["bosco"].density == 0.21
    assert str(PRESETS["bugsmovie"].rule) == "R10,C2,M0,S122..211,B123..170,NM"


@st.composite
def rules(draw):
    r = draw(st.integers(1, 16))
    kind = draw(st.sampled_from(list(NeighborhoodKind)))
    m = draw(st.integers(0, 1))
    limit = LtlRule(r=r, s1=0, s2=0, b1=0, b2=0, kind=kind, m=m).max_count
    s1, s2 = sorted(draw(st.lists(st.integers(0, limit), min_size=2, max_size=2)))
    b1, b2 = sorted(draw(st.lists(st.integers(0, limit), min_size=2, max_size=2)))
    return LtlRule(r=r, s1=s1, s2=s2, b1=b1, b2=b2, kind=kind, m=m)


@given(rules())
def test_format_parse_round_trip(rule):
    assert parse_ltl_rule(format_ltl_rule(rule)) == rule


def test_splitmix64_reference_vectors():
    gen = splitmix64(0)
    assert [next(gen) for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert next(splitmix64(1234567)) == 0x599ED017FB08FC85


@given(st.integers(0, 2 ** 64 - 1))
@settings(max_examples=50)
def test_vectorized_splitmix_matches_scalar(seed):
    gen = splitmix64(seed)
    assert splitmix64_array(seed, 20).tolist() == [next(gen) for _ in range(20)]


def test_random_cells_threshold_rule():
    gen = splitmix64(99)
    expected = [int(next(gen) / 2 ** 64 < 0.3) for _ in range(1000)]
    assert random_cells(1000, 0.3, 99).tolist() == expected


def test_init_random_extremes():
    assert init_random(16, GOL, 0.0, 42).alive() == 0
    g = init_random(16, GOL, 1.0, 42)
    assert g.alive() == 256
    assert g.as_2d().sum() == 256  # halo stays zero


def test_init_random_density_concentration():
    g = init_random(1024, GOL, 0.07, 1)
    assert abs(g.alive() / 1024 ** 2 - 0.07) <= 0.01


def test_init_random_deterministic():
    a = init_random(64, GOL, 0.4, 7)
    b = init_random(64, GOL, 0.4, 7)
    assert a.cells.tobytes() == b.cells.tobytes()
    assert a.cells.tobytes() != init_random(64, GOL, 0.4, 8).cells.tobytes()


def test_init_random_geometry_error():
    with pytest.raises(GeometryError):
        init_random(20, GOL, 0.5, 1)


def test_buffer_length():
    g = Grid.zeros(32, 16)
    assert g.cells.size == (32 + 32) ** 2 and g.halo == 16


def test_halo_of_dead_grid_is_dead():
    g = fill_periodic_halo(Grid.zeros(16, 4))
    assert g.cells.sum() == 0 and g.halo_filled


def test_halo_corner_wraps():
    g = Grid.zeros(16, 4)
    g.interior()[0, 0] = 1
    a = fill_periodic_halo(g).as_2d()
    h, n = 4, 16
    assert a[h + n, h + n] == 1  # image at (n, n)
    assert a[h + n, h] == 1 and a[h, h + n] == 1
    g2 = Grid.zeros(16, 4)
    g2.interior()[n - 1, n - 1] = 1
    assert fill_periodic_halo(g2).as_2d()[h - 1, h - 1] == 1  # (-1,-1) holds (n-1,n-1)
    assert a.sum() == 4


@pytest.mark.parametrize("f, n", [(4, 8), (4, 12), (8, 16)])
def test_halo_matches_modular_indexing_exhaustively(rng, f, n):
    g = fill_periodic_halo(random_grid(rng, n, f))
    a, inner = g.as_2d(), g.interior()
    for y in range(n):
        for x in range(n):
            for dy in range(-f, f + 1):
                for dx in range(-f, f + 1):
                    assert a[f + y + dy, f + x + dx] == inner[(y + dy) % n, (x + dx) % n]


def test_halo_idempotent(rng):
    g = fill_periodic_halo(random_grid(rng, 32, 16))
    once = g.cells.copy()
    assert np.array_equal(fill_periodic_halo(g).cells, once)


def test_halo_fragment_layout_matches_row_major(rng):
    from catsim.layout import to_fragment_layout, to_row_major
    g = random_grid(rng, 48, 16)
    frag = fill_periodic_halo(to_fragment_layout(g))
    assert frag.layout is Layout.FRAGMENT
    assert np.array_equal(to_row_major(frag).cells, fill_periodic_halo(g).cells)


@pytest.mark.parametrize(
    "state, reduction, expected",
    [(1, 3, 1), (0, 3, 1), (1, 5, 0), (1, 2, 0), (0, 2, 0), (1, 4, 1)],
)
def test_game_of_life_transition(state, reduction, expected):
    assert apply_transition(state, reduction, GOL, 1) == expected


def test_transition_center_handling():
    rule_m1 = LtlRule(r=1, s1=3, s2=3, b1=3, b2=3, m=1)
    assert apply_transition(1, 3, rule_m1, 1) == 1  # center counted once, kept
    vn = LtlRule(r=1, s1=2, s2=2, b1=2, b2=2, kind=NeighborhoodKind.VON_NEUMANN)
    assert apply_transition(1, 4, vn, 2) == 1  # 4 - 2*1 = 2
    vn1 = LtlRule(r=1, s1=3, s2=3, b1=3, b2=3, kind=NeighborhoodKind.VON_NEUMANN, m=1)
    assert apply_transition(1, 4, vn1, 2) == 1  # 4 - (2-1)*1 = 3


def test_transition_negative_count():
    with pytest.raises(ConsistencyError):
        apply_transition(1, 0, GOL, 1)


@given(rules(), st.integers(0, 1), st.data())
def test_transition_field_matches_scalar(rule, state, data):
    mult = rule.kind.center_multiplicity
    red = data.draw(st.integers(mult * state, rule.neighborhood_size + (mult - 1)))
    out = apply_transition(state, red, rule, mult)
    assert out in (0, 1)
    assert transition_field(np.array([state]), np.array([red]), rule, mult)[0] == out
