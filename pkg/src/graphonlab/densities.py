"""Canonical labeled-graph enumeration and induced-subgraph densities.

The enumeration orders graphs by vertex count, then by the integer encoding
of the upper-triangular adjacency bits: pairs are listed row-major
(0,1),(0,2),...,(0,n-1),(1,2),...; the pair at list position t is an edge
iff bit t of the block offset is set.

t_ind(F, W) is the probability that an n-vertex sample of W equals F as a
labeled graph. The exact sum runs over all k**n part assignments; it is
evaluated through an integer-scaled tensor contraction whenever every
intermediate provably fits in float64 exactly, and through a pruned
big-integer enumeration otherwise.
"""

from __future__ import annotations

import string
from fractions import Fraction
from math import comb, isqrt, lcm

import numpy as np

from .core import finite_graph, reduce_step_graphon
from .errors import InputError, TooExpensive
from .sampling import RandomSource, sample_graph

COST_LIMIT = 10 ** 7


def _block_size(n):
    return 2 ** comb(n, 2)


def _pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def enumerate_graph(i):
    """The i-th labeled graph: one vertex first, then blocks of growing n."""
    if i < 0:
        raise InputError(f"enumeration index must be nonnegative, got {i}")
    n = 1
    while i >= _block_size(n):
        i -= _block_size(n)
        n += 1
    edges = [pair for t, pair in enumerate(_pairs(n)) if (i >> t) & 1]
    return finite_graph(n, edges)


def graph_index(F):
    """Inverse of enumerate_graph."""
    offset = sum(_block_size(m) for m in range(1, F.n))
    bits = 0
    for t, pair in enumerate(_pairs(F.n)):
        if pair in F.edges:
            bits |= 1 << t
    return offset + bits


def _scaled_factors(F, W):
    # integer matrices L*W and L*(1-W) plus the common denominator L
    L = lcm(*[v.denominator for row in W.values for v in row])
    w = [[int(v * L) for v in row] for row in W.values]
    c = [[L - e for e in row] for row in w]
    return w, c, L


def _t_ind_einsum(F, W, w, c, L):
    n, k = F.n, W.k
    pairs = _pairs(n)
    letters = string.ascii_letters
    ops, subs = [], []
    wf = np.array(w, dtype=np.float64)
    cf = np.array(c, dtype=np.float64)
    for (i, j) in pairs:
        ops.append(wf if F.has_edge(i, j) else cf)
        subs.append(letters[i] + letters[j])
    if n == 4 and k ** 3 <= 2 ** 24:
        # pairing two vertices into one axis turns the k**4 step into a
        # matrix product; every intermediate is still an integer < 2**53
        ab, ac, ad, bc, bd, cd = ops
        inner = (ad[:, None, :] * bd[None, :, :]).reshape(k * k, k) @ cd.T
        total = np.einsum(
            "abc,ab,ac,bc->", inner.reshape(k, k, k), ab, ac, bc,
            optimize="greedy",
        )
    else:
        total = np.einsum(",".join(subs) + "->", *ops, optimize="greedy")
    return Fraction(int(round(float(total))), L ** len(pairs) * k ** n)


def _t_ind_loop(F, W, w, c, L):
    n, k = F.n, W.k
    # factor[v] lists (u, matrix) for u < v, consulted when v is assigned
    factor = [[] for _ in range(n)]
    for (i, j) in _pairs(n):
        factor[j].append((i, w if F.has_edge(i, j) else c))
    total = 0
    stack = [(0, 1, ())]
    while stack:
        v, prod, assign = stack.pop()
        if v == n:
            total += prod
            continue
        for col in range(k):
            p = prod
            for (u, mat) in factor[v]:
                p *= mat[assign[u]][col]
                if not p:
                    break
            if p:
                stack.append((v + 1, p, assign + (col,)))
    return Fraction(total, L ** comb(n, 2) * k ** n)


def t_ind_exact(F, W, cost_limit=COST_LIMIT):
    """Exact probability that an n-vertex sample of W equals F, labeled.

    Sum over assignments a: [n] -> [k] of k**-n times the product of
    W[a_i][a_j] over edges and (1 - W[a_i][a_j]) over non-edges. Raises
    TooExpensive when neither exact route is affordable; the reported cost
    is the assignment count k**n.
    """
    W = reduce_step_graphon(W)
    n, k = F.n, W.k
    if n == 1:
        return Fraction(1)
    w, c, L = _scaled_factors(F, W)
    terms = k ** n
    # every contraction intermediate is a nonnegative integer bounded by
    # k**n * L**pairs, so below 2**53 the float64 tensor path is exact
    if n <= len(string.ascii_letters) and terms * L ** comb(n, 2) < 2 ** 53:
        return _t_ind_einsum(F, W, w, c, L)
    if terms <= cost_limit:
        return _t_ind_loop(F, W, w, c, L)
    raise TooExpensive(terms, cost_limit)


def t_ind_mc(F, W, trials, seed):
    """Monte-Carlo estimate of t_ind with a one-sigma error radius.

    Returns (estimate, stderr) where stderr is the binomial standard error
    sqrt(p(1-p)/trials), rounded up to the next exact rational.
    """
    if trials < 1:
        raise InputError(f"trial count must be positive, got {trials}")
    rs = seed if isinstance(seed, RandomSource) else RandomSource(seed)
    hits = 0
    for _ in range(trials):
        G = sample_graph(W, F.n, rs)
        if G.edges == F.edges:
            hits += 1
    estimate = Fraction(hits, trials)
    var = estimate * (1 - estimate) / trials
    a, b = var.numerator, var.denominator
    root = isqrt(a * b)
    if root * root < a * b:
        root += 1
    return estimate, Fraction(root, b)


def counting_bound(F, eps):
    """Density-gap bound 4 * C(n,2) * eps driven by a cut-distance eps."""
    eps = Fraction(eps)
    if eps < 0:
        raise InputError(f"distance bound must be nonnegative, got {eps}")
    return 4 * comb(F.n, 2) * eps
