"""Graphons as names: rapidly converging sequences under a tagged metric,
and the translations between the four representations.

A name is valid when dist(s_j, s_l) stays below 2**-j for all j < l in the
tagged metric. Validation is exact for the L1, cut-norm, and truncated
enumeration metrics; for the alignment metric only brackets exist, so the
verdict can be Inconclusive.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, lcm

from .core import (
    FiniteGraph,
    blow_up,
    finite_graph,
    graphon_of_graph,
    stepping,
)
from .errors import (
    AlignmentBudgetExceeded,
    IllegalWeakening,
    InputError,
    NonConvergence,
    TruthMismatch,
)
from .metrics import (
    HAT_EXACT_LIMIT,
    d1,
    d_square,
    d_w_truncated,
    delta_bound,
    hat_delta,
)
from .sampling import RandomSource, empirical_graphon


class MetricTag(Enum):
    D1 = "d1"
    DSQUARE = "dsquare"
    DELTASQUARE = "deltasquare"
    DW = "dw"


class GraphonName:
    """Lazy memoized element sequence under a metric tag.

    Single producer: materializing a new element is serialized; reads of
    already-materialized prefixes need no lock.
    """

    def __init__(self, tag, element_fn, claimed_tol_fn=None):
        self.tag = tag
        self._fn = element_fn
        self._memo = {}
        self._lock = threading.Lock()
        self._tol_fn = claimed_tol_fn

    def element(self, j):
        if j < 0:
            raise InputError(f"element index must be nonnegative, got {j}")
        if j in self._memo:
            return self._memo[j]
        with self._lock:
            if j not in self._memo:
                self._memo[j] = self._fn(j)
            return self._memo[j]

    def claimed_tolerance(self, j):
        return self._tol_fn(j) if self._tol_fn is not None else None


def constant_name(W, tag):
    return GraphonName(tag, lambda j: W)


def _d1_level(W, eps):
    """Smallest dyadic level whose averaging is within eps of W in d1."""
    for n in range(0, 40):
        if d1(stepping(W, n), W) <= eps:
            return n
    raise NonConvergence(f"dyadic averaging does not reach {eps} by level 40")


def canonical_name(U, tag=MetricTag.D1):
    """Name of a step graphon by its own dyadic averagings, one per level,
    each within 2**-(j+1) of U in d1 (hence valid under every weaker tag)."""
    return GraphonName(
        tag, lambda j: stepping(U, _d1_level(U, Fraction(1, 2 ** (j + 1))))
    )


@dataclass(frozen=True)
class Ok:
    pass


@dataclass(frozen=True)
class Violation:
    j: int
    l: int
    evidence: str


@dataclass(frozen=True)
class Inconclusive:
    j: int
    l: int
    detail: str


def _as_graphon(elem):
    return graphon_of_graph(elem) if isinstance(elem, FiniteGraph) else elem


def validate_name_prefix(
    name, m, delta_budget=10 ** 4, dw_truncation=20, seed=0
):
    """Check dist(s_j, s_l) < 2**-j over all pairs j < l < m.

    Exact metrics give Ok or Violation; the alignment tag and the
    tail-bounded enumeration metric can also return Inconclusive when the
    certified bracket straddles the threshold.
    """
    if m < 2:
        raise InputError(f"prefix length must be at least 2, got {m}")
    pending = None
    for j in range(m):
        for l in range(j + 1, m):
            th = Fraction(1, 2 ** j)
            if name.tag in (MetricTag.D1, MetricTag.DSQUARE):
                dist_fn = d1 if name.tag is MetricTag.D1 else d_square
                dist = dist_fn(name.element(j), name.element(l))
                if dist >= th:
                    return Violation(
                        j, l, f"{name.tag.value} = {dist} > {th}"
                    )
            elif name.tag is MetricTag.DELTASQUARE:
                b = delta_bound(
                    name.element(j), name.element(l),
                    budget=delta_budget, seed=seed,
                )
                if b.lower > th:
                    return Violation(
                        j, l, f"certified lower bound {b.lower} > {th}"
                    )
                if b.upper > th and pending is None:
                    pending = Inconclusive(
                        j, l, f"bracket [{b.lower}, {b.upper}] straddles {th}"
                    )
            else:
                U = _as_graphon(name.element(j))
                V = _as_graphon(name.element(l))
                value, tail = d_w_truncated(U, V, dw_truncation)
                if value >= th:
                    return Violation(j, l, f"truncated dw = {value} > {th}")
                if value + tail >= th and pending is None:
                    pending = Inconclusive(
                        j, l,
                        f"head {value} + tail {tail} straddles {th}",
                    )
    return pending if pending is not None else Ok()


_WEAKENINGS = {
    (MetricTag.D1, MetricTag.DSQUARE),
    (MetricTag.DSQUARE, MetricTag.DELTASQUARE),
}


def weaken_name(name, frm, to):
    """Retag along a declared weakening; the element sequence is shared."""
    if name.tag is not frm:
        raise InputError(f"name is tagged {name.tag}, not {frm}")
    if (frm, to) not in _WEAKENINGS:
        raise IllegalWeakening(f"{frm.value} does not weaken to {to.value}")
    return GraphonName(to, name.element)


DW_THINNING_SHIFT = 3


def thinning_schedule(j):
    return j + DW_THINNING_SHIFT


def dw_counting_constant_bound():
    """Certified upper bound on sum over i of 2**-i * 4 * C(n_i, 2), the
    factor relating alignment distance to the enumeration metric.

    Blocks of fixed vertex count n occupy index ranges [start_n, end_n);
    their weight is summed in closed form. Orders above 5 start past index
    1098, bounded crudely by 2**-1080.
    """
    total = Fraction(0)
    start = 0
    for n in range(1, 6):
        end = start + 2 ** comb(n, 2)
        total += 4 * comb(n, 2) * (Fraction(2, 2 ** start) - Fraction(2, 2 ** end))
        start = end
    return total + Fraction(1, 2 ** 1080)


def name_delta_to_dw(name):
    """Thin an alignment-metric name into an enumeration-metric name.

    Element j reads input index j + 3: the counting bound gives
    dw <= C* * dist with C* certified below 8 = 2**3, so the shifted rate
    2**-(j+3) lands under 2**-j.
    """
    return GraphonName(MetricTag.DW, lambda j: name.element(thinning_schedule(j)))


def name_dw_to_delta(name, rs):
    """Sample finite graphs of growing order from the name's elements.

    Element j is the empirical graphon of a 4**(j+2)-vertex sample. The
    theoretical tolerance 44/sqrt(log k) is recorded per element; it is
    vacuous at these orders, so downstream checks rely on measured
    alignment brackets instead.
    """
    base = rs if isinstance(rs, RandomSource) else RandomSource(rs)

    def build(j):
        src = _as_graphon(name.element(j + 2))
        return empirical_graphon(src, 4 ** (j + 2), base.derive(j))

    def claim(j):
        return 44.0 / math.sqrt(math.log(4 ** (j + 2)))

    return GraphonName(MetricTag.DELTASQUARE, build, claimed_tol_fn=claim)


def _graphify(W):
    """Present a rational step graphon as a finite graph with the same
    block densities: banded bipartite blocks off the diagonal, symmetric
    circulant bands inside it. 0/1 graphons with a zero diagonal pass
    through as plain graphs."""
    k = W.k
    if all(
        W.values[i][j] in (0, 1) and (i != j or W.values[i][j] == 0)
        for i in range(k)
        for j in range(k)
    ):
        edges = [
            (i, j) for i in range(k) for j in range(i + 1, k) if W.values[i][j] == 1
        ]
        return finite_graph(k, edges)
    b = lcm(*(v.denominator for row in W.values for v in row))
    # resolution floor keeps the diagonal rounding error 2/R below 1/8
    R = 2 * b * max(1, -(-8 // b))
    n = k * R

    def edge(x, y):
        i, j = x // R, y // R
        a, c = x % R, y % R
        d = (a - c) % R
        w = int(W.values[i][j] * R)
        if i != j:
            return d < w
        # loop-free diagonal bands cap at density (R-2)/R; rounding error
        # per such block is at most 2/R
        h = min(w, R - 2) // 2
        return d != 0 and (d <= h or d >= R - h)

    edges = [(x, y) for x in range(n) for y in range(x + 1, n) if edge(x, y)]
    return finite_graph(n, edges)


def _blow_graph(G, m):
    if m < 1:
        raise InputError(f"blow-up factor must be positive, got {m}")
    if m == 1:
        return G
    n = G.n * m
    edges = [
        (v * m + i, w * m + j)
        for v in range(G.n)
        for w in range(v + 1, G.n)
        if G.has_edge(v, w)
        for i in range(m)
        for j in range(m)
    ]
    return finite_graph(n, edges)


def _relabel_graph(G, sigma):
    edges = [
        tuple(sorted((x, y)))
        for x in range(G.n)
        for y in range(x + 1, G.n)
        if G.has_edge(sigma[x], sigma[y])
    ]
    return finite_graph(G.n, edges)


def _neighbor_keys(G):
    return [
        frozenset(w for w in range(G.n) if G.has_edge(v, w)) for v in range(G.n)
    ]


def _collapse_contiguous(G):
    """Quotient consecutive equal-size twin classes; the labeled graphon is
    unchanged, being its own uniform blow-up."""
    while True:
        keys = _neighbor_keys(G)
        classes = []
        for v in range(G.n):
            if classes and keys[v] == keys[classes[-1][0]]:
                classes[-1].append(v)
            else:
                classes.append([v])
        sizes = {len(c) for c in classes}
        if len(sizes) != 1 or sizes == {1}:
            return G
        m = sizes.pop()
        q = len(classes)
        edges = [
            (a, b)
            for a in range(q)
            for b in range(a + 1, q)
            if G.has_edge(classes[a][0], classes[b][0])
        ]
        G = finite_graph(q, edges)


def _reduce_presentation(G):
    """Collapse scattered equal-size twin classes, reordering by least
    member; only used before alignment, which reorders anyway."""
    keys = _neighbor_keys(G)
    groups = {}
    for v in range(G.n):
        groups.setdefault(keys[v], []).append(v)
    classes = sorted(groups.values(), key=min)
    sizes = {len(c) for c in classes}
    if len(sizes) != 1 or sizes == {1}:
        return G
    q = len(classes)
    edges = [
        (a, b)
        for a in range(q)
        for b in range(a + 1, q)
        if G.has_edge(classes[a][0], classes[b][0])
    ]
    return _reduce_presentation(finite_graph(q, edges))


def _graph_cut_distance(G, H, exact_part_limit=20, blow_cap=4096):
    """Exact labeled cut distance between two graph presentations."""
    U, V = graphon_of_graph(G), graphon_of_graph(H)
    K = lcm(U.k, V.k)
    if K <= exact_part_limit:
        return d_square(U, V, mode="exact")
    if K <= blow_cap and blow_up(U, K // U.k).values == blow_up(V, K // V.k).values:
        return Fraction(0)
    raise AlignmentBudgetExceeded(
        f"certificate needs an exact cut norm on {K} parts"
    )


@dataclass(frozen=True)
class SectionStage:
    graph: FiniteGraph
    certificate: Fraction


SECTION_STAGE_SHIFT = 7


def section_delta_to_dsquare(name, align_budget=2000, seed=0):
    """Convert an alignment-metric name of graph presentations into a
    cut-norm name by iterated aligning.

    Stage n reads input index 2**(2n) + 1, reduces it to a graph, aligns
    it to the previous stage on a common blow-up (exhaustive through 8
    vertices, descent beyond), and emits it only with an exact cut-norm
    certificate <= 45 * 2**-(n-1) to its predecessor. Output element j is
    stage j + 7, so the certified chain tail 90 * 2**-(j+7) sits inside
    the 2**-j rate. The stages themselves are exposed as name.stages.
    """
    stages = []
    lock = threading.Lock()

    def stage(n):
        if n < 0:
            raise InputError(f"stage index must be nonnegative, got {n}")
        with lock:
            while len(stages) <= n:
                m = len(stages)
                if m == 0:
                    G0 = _reduce_presentation(_graphify(name.element(2)))
                    stages.append(SectionStage(G0, Fraction(0)))
                    continue
                prev = stages[m - 1].graph
                H = _reduce_presentation(_graphify(name.element(2 ** (2 * m) + 1)))
                L = lcm(prev.n, H.n)
                Hb = _blow_graph(H, L // H.n)
                Gb = _blow_graph(prev, L // prev.n)
                if L <= HAT_EXACT_LIMIT:
                    db = hat_delta(Hb, Gb, mode="exact")
                else:
                    db = hat_delta(
                        Hb, Gb, mode="heuristic", budget=align_budget,
                        seed=seed + m,
                    )
                aligned = _collapse_contiguous(_relabel_graph(Hb, db.witness[1]))
                cert = _graph_cut_distance(aligned, prev)
                threshold = Fraction(45, 2 ** (m - 1))
                if cert > threshold:
                    raise AlignmentBudgetExceeded(
                        f"stage {m} certificate {cert} exceeds 45 * 2**-{m - 1}"
                    )
                stages.append(SectionStage(aligned, cert))
            return stages[n]

    out = GraphonName(
        MetricTag.DSQUARE,
        lambda j: graphon_of_graph(stage(j + SECTION_STAGE_SHIFT).graph),
    )
    out.stages = stage
    return out


def martingale_from_dsquare_name(name, n, target_err):
    """Dyadic level n of the limit, from deep enough in a cut-norm name.

    The cut norm bounds every rectangle integral, so each level-n cell
    average of element K is within 4**n * 2**-K of the limit's; K is the
    smallest index meeting target_err.
    """
    if n < 0:
        raise InputError(f"dyadic level must be nonnegative, got {n}")
    target = Fraction(target_err)
    if target <= 0:
        raise InputError(f"error target must be positive, got {target}")
    K = 0
    while Fraction(4 ** n, 2 ** K) > target:
        K += 1
    return stepping(name.element(K), n), Fraction(4 ** n, 2 ** K)


class MartingaleStream:
    """Lazy sequence of dyadic averaging levels with per-level error bounds."""

    def __init__(self, name, target_fn=None):
        self._name = name
        self._target = target_fn or (lambda n: Fraction(1, 2 ** (n + 2)))
        self._memo = {}

    def _get(self, n):
        if n not in self._memo:
            self._memo[n] = martingale_from_dsquare_name(
                self._name, n, self._target(n)
            )
        return self._memo[n]

    def level(self, n):
        return self._get(n)[0]

    def error(self, n):
        return self._get(n)[1]


def randomfree_d1_distance(f):
    """Exact L1 distance from f to the 0/1 graphon it averages, cellwise
    2 p (1 - p). Meaningful only when f is a dyadic averaging of a 0/1
    graphon; the formula is evaluated regardless."""
    k = f.k
    return sum(
        2 * p * (1 - p) for row in f.values for p in row
    ) * Fraction(1, k * k)


def randomfree_defect(W):
    """Exact integral of W(1-W); zero iff W is 0/1 valued."""
    k = W.k
    return sum(p * (1 - p) for row in W.values for p in row) * Fraction(1, k * k)


def randomfree_d1_name(name, rf_promise=True, level_budget=16):
    """Upgrade a cut-norm name to an L1 name under a random-free promise.

    Element j scans dyadic levels: the L1 distance from level f to the
    promised 0/1 limit is the cellwise defect formula, off by at most three
    times the extraction error. Levels that never sink below the rate
    expose a violated promise as NonConvergence.
    """
    if not rf_promise:
        raise InputError("requires the caller's random-free promise")

    def build(j):
        slack = Fraction(1, 2 ** (j + 3))
        for n in range(1, level_budget + 1):
            f, e = martingale_from_dsquare_name(name, n, slack)
            if randomfree_d1_distance(f) + 3 * e < Fraction(1, 2 ** (j + 1)):
                return f
        raise NonConvergence(
            f"element {j}: no level within {level_budget} reaches "
            f"2**-{j + 1}; the limit may not be random-free"
        )

    return GraphonName(MetricTag.D1, build)


@dataclass(frozen=True)
class NotRandomFree:
    level: int


@dataclass(frozen=True)
class Undecided:
    levels_checked: int


def randomfree_semidecide(name, budget):
    """Report a certified witness that the L1 name's limit is not
    random-free, or Undecided within the level budget.

    The defect is 2-Lipschitz in d1, so defect(s_j) - 2 * 2**-j lower
    bounds the limit's defect.
    """
    if budget < 0:
        raise InputError(f"budget must be nonnegative, got {budget}")
    for j in range(budget + 1):
        lower = randomfree_defect(name.element(j)) - Fraction(2, 2 ** j)
        if lower > 0:
            return NotRandomFree(j)
    return Undecided(budget + 1)


def d1_name_with_ground_truth(name, truth):
    """L1 name derived from a cut-norm name plus exact knowledge of its
    limit, standing in for the classical jump oracle.

    Each requested element first verifies the input element against the
    limit by exact cut norm, then emits a dyadic averaging of the limit
    fine enough for the L1 rate.
    """

    def build(j):
        gap = d_square(name.element(j), truth)
        if gap > Fraction(1, 2 ** j):
            raise TruthMismatch(
                f"element {j} sits {gap} from the claimed limit, above 2**-{j}"
            )
        return stepping(truth, _d1_level(truth, Fraction(1, 2 ** (j + 1))))

    return GraphonName(MetricTag.D1, build)
