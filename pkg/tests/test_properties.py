"""Randomized invariant checks over the exact-rational API."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from graphonlab import (
    MetricTag,
    Ok,
    blow_up,
    canonical_name,
    d1,
    d2,
    d_square,
    delta_bound,
    enumerate_graph,
    fractal_stage,
    graph_index,
    make_step_graphon,
    permute_parts,
    randomfree_defect,
    reduce_step_graphon,
    stepping,
    t_ind_exact,
    validate_name_prefix,
    value_spectrum,
    weaken_name,
)

COMMON = settings(max_examples=25, deadline=None, derandomize=True)


@st.composite
def step_graphons(draw, max_k=5, den=8):
    k = draw(st.integers(1, max_k))
    cells = k * (k + 1) // 2
    tri = iter(draw(st.lists(st.integers(0, den), min_size=cells, max_size=cells)))
    vals = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            vals[i][j] = vals[j][i] = Fraction(next(tri), den)
    return make_step_graphon(k, vals)


@st.composite
def graphon_tuples(draw, count, max_k=5):
    k = draw(st.integers(1, max_k))
    return tuple(draw(_fixed_k(k)) for _ in range(count))


def _fixed_k(k, den=8):
    cells = k * (k + 1) // 2
    return st.lists(st.integers(0, den), min_size=cells, max_size=cells).map(
        lambda tri: _build(k, tri, den)
    )


def _build(k, tri, den):
    it = iter(tri)
    vals = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            vals[i][j] = vals[j][i] = Fraction(next(it), den)
    return make_step_graphon(k, vals)


@COMMON
@given(step_graphons(), step_graphons())
def test_metric_axioms(U, V):
    assert d1(U, U) == d2(U, U) == d_square(U, U) == 0
    assert d1(U, V) == d1(V, U)
    assert d_square(U, V) == d_square(V, U)


@COMMON
@given(step_graphons(max_k=4), step_graphons(max_k=4))
def test_metric_chain(U, V):
    b = delta_bound(U, V, budget=100)
    assert 0 <= b.lower <= b.upper <= d_square(U, V) <= d1(U, V) <= 1


@COMMON
@given(graphon_tuples(3, max_k=4))
def test_triangle_inequalities(triple):
    A, B, C = triple
    assert d1(A, C) <= d1(A, B) + d1(B, C)
    assert d_square(A, C) <= d_square(A, B) + d_square(B, C)


@COMMON
@given(step_graphons(max_k=4), step_graphons(max_k=4), st.integers(1, 3))
def test_blow_up_invariance(U, V, m):
    assert d1(blow_up(U, m), U) == 0
    assert d_square(blow_up(U, m), V) == d_square(U, V)
    F = enumerate_graph(5)
    assert t_ind_exact(F, blow_up(U, m)) == t_ind_exact(F, U)


@COMMON
@given(step_graphons(max_k=5), st.randoms(use_true_random=False))
def test_relabeling_invariance(W, rnd):
    perm = list(range(W.k))
    rnd.shuffle(perm)
    P = permute_parts(W, perm)
    F = enumerate_graph(7)
    assert t_ind_exact(F, P) == t_ind_exact(F, W)
    assert value_spectrum(P) == value_spectrum(W)


@COMMON
@given(step_graphons(max_k=4))
def test_three_vertex_block_is_a_partition(W):
    total = sum(t_ind_exact(enumerate_graph(i), W) for i in range(3, 11))
    assert total == 1


@COMMON
@given(st.integers(0, 120))
def test_enumeration_round_trip(i):
    assert graph_index(enumerate_graph(i)) == i


@COMMON
@given(step_graphons(), st.integers(1, 3))
def test_reduce_soundness(W, m):
    R = reduce_step_graphon(W)
    assert d1(R, W) == 0
    assert reduce_step_graphon(R) == R
    assert reduce_step_graphon(blow_up(W, m)) == R


@COMMON
@given(step_graphons())
def test_spectrum_is_a_distribution(W):
    entries = value_spectrum(W)
    assert sum(e.mass for e in entries) == 1
    values = [e.value for e in entries]
    assert values == sorted(set(values))
    assert all(0 <= v <= 1 and e.mass > 0 for v, e in zip(values, entries))


@given(st.integers(1, 5))
@settings(deadline=None, derandomize=True)
def test_white_measure_product(d):
    expect = 1
    for m in range(1, d + 1):
        expect *= 1 - Fraction(1, 2 ** m)
    assert fractal_stage(d).white_measure() == expect


@COMMON
@given(graphon_tuples(2, max_k=5))
def test_defect_is_lipschitz(pair):
    U, V = pair
    assert abs(randomfree_defect(U) - randomfree_defect(V)) <= d1(U, V)


@COMMON
@given(step_graphons(), st.integers(0, 2), st.integers(0, 2))
def test_stepping_tower_law(W, a, extra):
    b = a + extra
    assert d1(stepping(stepping(W, b), a), stepping(W, a)) == 0


@COMMON
@given(step_graphons())
def test_stepping_l2_error_monotone(W):
    errs = [d2(stepping(W, n), W) for n in range(4)]
    assert all(x >= y for x, y in zip(errs, errs[1:]))


@settings(max_examples=10, deadline=None, derandomize=True)
@given(step_graphons(max_k=4))
def test_weakening_preserves_validity(U):
    name = canonical_name(U, MetricTag.D1)
    assert isinstance(validate_name_prefix(name, 4), Ok)
    weak = weaken_name(name, MetricTag.D1, MetricTag.DSQUARE)
    assert isinstance(validate_name_prefix(weak, 4), Ok)
