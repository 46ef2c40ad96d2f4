from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcfg.fis import (
    MAX_LP_PARTIES,
    FisError,
    FractionalWeights,
    facet_weights,
    fis_decomposed,
    fis_family,
    fis_greedy,
    fis_optimal,
    is_valid_fis,
    parse_rational,
    uniform_assignment,
)
from netcfg.topology import builtin, from_sources, identify

from oracles import lp_oracle
from test_topology import topologies

TRIANGLE_WITH_FAN = from_sources(5, [[0, 1], [1, 2], [0, 2], [2, 3, 4]])


def fr(*xs):
    return tuple(F(x) for x in xs)


def test_validity_examples():
    tri = builtin("cycle", 3)
    assert is_valid_fis(tri, fr("1/2", "1/2", "1/2"))
    assert not is_valid_fis(tri, fr("1/2", "1/2", "2/3"))
    assert is_valid_fis(builtin("chain", 3), fr(1, 0, 1))
    with pytest.raises(FisError):
        is_valid_fis(tri, fr(1, 0))


def test_single_source_condition():
    t = builtin("single_source", 3)
    assert is_valid_fis(t, fr("1/2", "1/4", "1/4"))
    assert not is_valid_fis(t, fr("1/2", "1/4", "1/3"))


def test_duplicate_sources_count_separately():
    t = from_sources(2, [[0, 1], [0, 1]])
    assert is_valid_fis(t, fr("1/2", "1/2"))
    assert not is_valid_fis(t, fr("1/2", "2/3"))


def test_greedy_examples():
    assert fis_greedy(TRIANGLE_WITH_FAN).weights == fr("1/2", "1/2", "1/3", "1/3", "1/3")
    assert fis_greedy(builtin("complete", 3, 2)).weights == fr("1/2", "1/2", "1/2")
    assert fis_greedy(from_sources(1, [])).weights == fr(1)


def test_decomposed_examples():
    half = [F(1, 2), F(1, 2)]
    w = fis_decomposed(TRIANGLE_WITH_FAN, [half, half, half, [F(1, 2), F(1, 4), F(1, 4)]])
    assert w.weights == fr("1/2", "1/2", "1/2", "1/4", "1/4")
    assert w.provenance == "decomposed"
    zero = fis_decomposed(TRIANGLE_WITH_FAN, [[0, 0], [0, 0], [0, 0], [0, 0, 0]])
    assert zero.weights == fr(0, 0, 0, 0, 0)


def test_decomposed_rejects_oversum():
    with pytest.raises(FisError, match="sums to"):
        fis_decomposed(builtin("chain", 2), [[F(2, 3), F(2, 3)]])


def test_decomposed_star_matches_family():
    m, k = 7, 3
    per_edge = [[F(k, m), F(m - k, m)]] * 3
    assert fis_decomposed(builtin("star", 4), per_edge).weights == fis_family("star", 4, m, k, "a").weights


def test_family_examples():
    assert fis_family("chain", 3, 2, 1).weights == fr("1/2", "1/2", "1/2")
    assert fis_family("star", 4, 5, 2, "a").weights == fr("2/5", "2/5", "2/5", "3/5")
    assert fis_family("star", 4, 5, 2, "b").weights == fr("3/5", "3/5", "3/5", "2/5")
    assert fis_family("complete", 4, 3).weights == fr("1/3", "1/3", "1/3", "1/3")


def test_family_chain_patterns():
    assert fis_family("chain", 4, 5, 2, "a").weights == fr("2/5", "3/5", "2/5", "3/5")
    assert fis_family("chain", 5, 5, 2, "a").weights == fr("3/5", "2/5", "3/5", "2/5", "3/5")
    assert fis_family("chain", 4, 5, 2, "b").weights == fr("3/5", "2/5", "3/5", "2/5")
    assert fis_family("chain", 5, 5, 2, "b").weights == fr("3/5", "2/5", "3/5", "2/5", "2/5")


def test_family_errors():
    with pytest.raises(FisError):
        fis_family("chain", 5, 5, 3, "b")  # 2k > m
    with pytest.raises(FisError):
        fis_family("chain", 3, 1, 1)
    with pytest.raises(FisError):
        fis_family("chain", 3, 4, 4)
    with pytest.raises(FisError):
        fis_family("cycle", 5, 5, 2, "a")  # odd cycle wrap edge carries 6/5
    assert is_valid_fis(builtin("cycle", 5), fis_family("cycle", 5, 5, 3, "a"))


def test_facet_examples():
    assert facet_weights("chain", 3, "odd_parties").weights == fr(1, 0, 1)
    assert facet_weights("star", 5, "hub").weights == fr(0, 0, 0, 0, 1)
    assert facet_weights("star", 5, "leaves").weights == fr(1, 1, 1, 1, 0)
    assert facet_weights("cycle", 4, "even_parties").weights == fr(0, 1, 0, 1)
    with pytest.raises(FisError):
        facet_weights("star", 4, "odd_parties")
    with pytest.raises(FisError):
        facet_weights("cycle", 5, "odd_parties")


def test_optimal_examples():
    for kind, n, expect, value in [
        ("cycle", 3, fr("1/2", "1/2", "1/2"), F(3, 2)),
        ("chain", 3, fr(1, 0, 1), 2),
        ("star", 4, fr(1, 1, 1, 0), 3),
    ]:
        w = fis_optimal(builtin(kind, n))
        assert w.weights == expect
        assert w.total() == value


def test_optimal_cap():
    with pytest.raises(FisError, match="capped"):
        fis_optimal(builtin("chain", MAX_LP_PARTIES + 1))


def test_optimal_objective():
    w = fis_optimal(builtin("chain", 3), [0, 1, 0])
    assert w.weights == fr(0, 1, 0)


def test_render_and_parse():
    assert FractionalWeights(fr("1/2", 0, 1)).render() == "1/2 0 1"
    assert parse_rational("0.5") == F(1, 2)
    assert parse_rational("3/7") == F(3, 7)
    assert parse_rational("0.333333333333").denominator <= 10**6


@st.composite
def family_args(draw):
    kind = draw(st.sampled_from(["chain", "star", "cycle"]))
    n = draw(st.integers(3, 9))
    m = draw(st.integers(2, 50))
    k = draw(st.integers(1, m - 1))
    variant = draw(st.sampled_from(["a", "b"]))
    return kind, n, m, k, variant


@given(topologies(max_n=10))
def test_generators_always_valid(t):
    assert is_valid_fis(t, fis_greedy(t))
    assert is_valid_fis(t, fis_decomposed(t, uniform_assignment(t)))
    assert is_valid_fis(t, fis_optimal(t))


@given(topologies(max_n=10))
def test_greedy_equals_uniform_decomposition(t):
    assert fis_greedy(t).weights == fis_decomposed(t, uniform_assignment(t)).weights


@settings(max_examples=60)
@given(topologies(max_n=5, max_edges=6))
def test_optimal_matches_vertex_enumeration(t):
    assert fis_optimal(t).weights == lp_oracle(t)


@settings(max_examples=40)
@given(topologies(max_n=4, max_edges=5), st.lists(st.integers(0, 3), min_size=5, max_size=5))
def test_optimal_weighted_matches_vertex_enumeration(t, obj):
    obj = obj[: t.n]
    assert fis_optimal(t, obj).weights == lp_oracle(t, obj)


@given(family_args())
def test_family_valid_or_rejected(args):
    kind, n, m, k, variant = args
    try:
        w = fis_family(kind, n, m, k, variant)
    except FisError:
        return
    t = builtin(kind, n)
    assert is_valid_fis(t, w)
    assert fis_optimal(t).total() >= w.total()
    assert fis_optimal(t).total() >= fis_greedy(t).total()


FACET_LIMITS = [
    # (kind, n, variant) -> facet variant of the m -> infinity limit
    ("chain", 4, "a", "even_parties"),
    ("chain", 4, "b", "odd_parties"),
    ("chain", 5, "a", "odd_parties"),
    ("cycle", 6, "a", "even_parties"),
    ("cycle", 6, "b", "odd_parties"),
    ("star", 5, "a", "hub"),
    ("star", 5, "b", "leaves"),
]


@pytest.mark.parametrize("kind,n,variant,facet", FACET_LIMITS)
def test_facet_is_large_m_limit(kind, n, variant, facet):
    f = facet_weights(kind, n, facet)
    for k in (1, 2, 5):
        near = fis_family(kind, n, 10**6, k, variant)
        assert all(abs(a - b) <= F(1, 10**5) for a, b in zip(near, f))
    # exact limit: each entry is k/m or (m-k)/m, with limits 0 and 1
    m = 10**6
    exact_limit = tuple(F(0) if x == F(1, m) else F(1) for x in fis_family(kind, n, m, 1, variant))
    assert exact_limit == f.weights
    assert identify(builtin(kind, n)) == kind
