"""Pseudometrics between step graphons.

d1 and d2 are exact cellwise integrals on the common refinement. The cut
norm is computed exactly by enumerating row subsets with a greedy column
choice; the objective is bilinear in fractional part memberships, so it is
maximized at a vertex of the membership box and part subsets suffice.
Alignment distances (hat_delta, delta_bound) report two-sided DeltaBound
results and never claim the infimum itself.

All exact routines work on integer matrices scaled by the lcm of the cell
denominators; float64 is used only where every intermediate is provably an
exactly representable integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import comb, factorial, lcm

import numpy as np

from .core import blow_up, reduce_step_graphon
from .densities import COST_LIMIT, enumerate_graph, t_ind_exact
from .errors import (
    AsymmetricMatrix,
    ExactTooLarge,
    InputError,
    OutOfRange,
    SizeMismatch,
    TooManyParts,
)
from .sampling import RandomSource

EXACT_LIMIT = 20
FULL_ENUM_LIMIT = 12
HAT_EXACT_LIMIT = 8
ALIGN_EXACT_LIMIT = 12

_CHUNK = 1 << 14


@dataclass(frozen=True)
class DeltaBound:
    """Two-sided bracket for the alignment distance.

    witness, when present, is a (blow-up factor, permutation) pair whose
    aligned cut distance equals upper exactly.
    """

    lower: Fraction
    upper: Fraction
    witness: tuple | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise InputError(f"lower {self.lower} exceeds upper {self.upper}")


def _scaled_rows(matrices):
    """Common integer scaling of several rational matrices; returns L last."""
    L = 1
    for M in matrices:
        for row in M:
            for v in row:
                L = lcm(L, Fraction(v).denominator)
    outs = [[[int(Fraction(v) * L) for v in row] for row in M] for M in matrices]
    return outs + [L]


def _refined_diff(U, V):
    """Integer difference matrix on the common refinement, with its scale."""
    U, V = reduce_step_graphon(U), reduce_step_graphon(V)
    K = lcm(U.k, V.k)
    Ur = blow_up(U, K // U.k)
    Vr = blow_up(V, K // V.k)
    L = 1
    for W in (Ur, Vr):
        for row in W.values:
            for v in row:
                L = lcm(L, v.denominator)
    rows = [
        [int((Ur.values[i][j] - Vr.values[i][j]) * L) for j in range(K)]
        for i in range(K)
    ]
    return rows, L, K


def d1(U, V):
    """Exact L1 distance: mean of |U - V| over the square."""
    rows, L, K = _refined_diff(U, V)
    total = sum(abs(e) for row in rows for e in row)
    return Fraction(total, L * K * K)


def d2(U, V):
    """Exact squared L2 distance: mean of (U - V)**2 over the square."""
    rows, L, K = _refined_diff(U, V)
    total = sum(e * e for row in rows for e in row)
    return Fraction(total, L * L * K * K)


def _subset_bits(lo, hi, k):
    rows = np.arange(lo, hi, dtype=np.uint64)
    return ((rows[:, None] >> np.arange(k, dtype=np.uint64)) & 1).astype(
        np.float64
    )


def _cut_extrema_float(rows, K):
    # exact while K*K*max|entry| < 2**53: all partial sums are integers
    Df = np.array(rows, dtype=np.float64)
    hi_best, lo_best = 0, 0
    for lo in range(0, 2 ** K, _CHUNK):
        bits = _subset_bits(lo, min(lo + _CHUNK, 2 ** K), K)
        CS = bits @ Df
        pos = np.where(CS > 0.0, CS, 0.0).sum(axis=1)
        neg = np.where(CS < 0.0, CS, 0.0).sum(axis=1)
        hi_best = max(hi_best, int(pos.max()))
        lo_best = min(lo_best, int(neg.min()))
    return hi_best, lo_best


def _cut_extrema_int64(rows, K):
    Di = [np.array(row, dtype=np.int64) for row in rows]
    cs = np.zeros(K, dtype=np.int64)
    hi_best, lo_best = 0, 0
    prev = 0
    for s in range(1, 2 ** K):
        gray = s ^ (s >> 1)
        bit = (gray ^ prev).bit_length() - 1
        prev = gray
        if (gray >> bit) & 1:
            cs += Di[bit]
        else:
            cs -= Di[bit]
        hi_best = max(hi_best, int(cs[cs > 0].sum()))
        lo_best = min(lo_best, int(cs[cs < 0].sum()))
    return hi_best, lo_best


def _cut_extrema_bigint(rows, K):
    cs = [0] * K
    hi_best, lo_best = 0, 0
    prev = 0
    for s in range(1, 2 ** K):
        gray = s ^ (s >> 1)
        bit = (gray ^ prev).bit_length() - 1
        prev = gray
        row = rows[bit]
        if (gray >> bit) & 1:
            cs = [a + b for a, b in zip(cs, row)]
        else:
            cs = [a - b for a, b in zip(cs, row)]
        hi_best = max(hi_best, sum(c for c in cs if c > 0))
        lo_best = min(lo_best, sum(c for c in cs if c < 0))
    return hi_best, lo_best


def _cut_extrema(rows, K):
    """(max, min) over part subsets S, T of the scaled sum over S x T."""
    m = max((abs(e) for row in rows for e in row), default=0)
    if m == 0:
        return 0, 0
    if K * K * m < 2 ** 53:
        return _cut_extrema_float(rows, K)
    if K * K * m < 2 ** 62:
        return _cut_extrema_int64(rows, K)
    return _cut_extrema_bigint(rows, K)


def _validate_signed(F):
    rows = [[Fraction(v) for v in row] for row in F]
    K = len(rows)
    if K == 0 or any(len(row) != K for row in rows):
        raise InputError("signed step function must be a nonempty square matrix")
    for i in range(K):
        for j in range(K):
            if not -1 <= rows[i][j] <= 1:
                raise OutOfRange(f"entry ({i},{j}) = {rows[i][j]} outside [-1,1]")
    for i in range(K):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise AsymmetricMatrix(f"entries ({i},{j}) and ({j},{i}) differ")
    return rows, K


def cut_norm(F, mode="exact", exact_limit=EXACT_LIMIT, seed=0, restarts=16):
    """Cut norm of a symmetric signed step function with entries in [-1,1].

    Exact mode enumerates the 2**k row subsets (greedy optimal columns) and
    is refused above exact_limit parts. Heuristic mode runs alternating
    maximization from seeded random starts and returns the best value it
    achieves; any concrete (S, T) certifies a lower bound on the norm.
    """
    rows, K = _validate_signed(F)
    scaled = _scaled_rows([rows])
    ints, L = scaled[0], scaled[1]
    if mode == "exact":
        if K > exact_limit:
            raise TooManyParts(
                f"{K} parts exceeds exact limit {exact_limit}; "
                "request heuristic mode for an achievable value"
            )
        hi, lo = _cut_extrema(ints, K)
        return Fraction(max(hi, -lo), L * K * K)
    if mode == "heuristic":
        val, _, _ = _heuristic_cut(ints, K, seed, restarts)
        return Fraction(val, L * K * K)
    raise InputError(f"unknown mode {mode!r}")


def _heuristic_cut(rows, K, seed, restarts):
    """Alternating maximization; returns (value, S, T), value achievable."""
    A = np.array(rows, dtype=np.float64)
    rs = RandomSource(seed)
    best, best_st = 0, (0, 0)
    for r in range(max(1, restarts)):
        for sign in (1.0, -1.0):
            if r == 0:
                s = np.ones(K)
            else:
                s = np.array([rs.getrandbits(1) for _ in range(K)], dtype=float)
            for _ in range(64):
                col = sign * (s @ A)
                t = (col > 0).astype(float)
                row = sign * (A @ t)
                s2 = (row > 0).astype(float)
                if np.array_equal(s2, s):
                    break
                s = s2
            S = [i for i in range(K) if s[i]]
            T = [j for j in range(K) if t[j]]
            val = abs(sum(rows[i][j] for i in S for j in T))
            if val > best:
                best, best_st = val, (S, T)
    return best, best_st[0], best_st[1]


def cut_norm_full_enumeration(F):
    """Independent oracle: maximize over all (S, T) subset pairs directly.

    Quadratic in the subset count, so limited to 12 parts; used to
    cross-check the row-subset + greedy-column method.
    """
    rows, K = _validate_signed(F)
    scaled = _scaled_rows([rows])
    ints, L = scaled[0], scaled[1]
    if K > FULL_ENUM_LIMIT:
        raise TooManyParts(f"{K} parts exceeds enumeration limit {FULL_ENUM_LIMIT}")
    m = max((abs(e) for row in ints for e in row), default=0)
    if K * K * m >= 2 ** 53:
        raise InputError("entries too large for the float64 enumeration oracle")
    Df = np.array(ints, dtype=np.float64)
    bits = _subset_bits(0, 2 ** K, K)
    CS = bits @ Df
    best = 0.0
    for lo in range(0, 2 ** K, 1 << 10):
        M = CS @ bits[lo : lo + (1 << 10)].T
        best = max(best, float(np.abs(M).max()))
    return Fraction(int(best), L * K * K)


def d_square(U, V, mode="exact", exact_limit=EXACT_LIMIT, seed=0, restarts=16):
    """Cut distance: cut norm of U - V on the common refinement."""
    rows, L, K = _refined_diff(U, V)
    if mode == "exact":
        if K > exact_limit:
            raise TooManyParts(
                f"common refinement has {K} parts, exact limit {exact_limit}"
            )
        hi, lo = _cut_extrema(rows, K)
        return Fraction(max(hi, -lo), L * K * K)
    if mode == "heuristic":
        val, _, _ = _heuristic_cut(rows, K, seed, restarts)
        return Fraction(val, L * K * K)
    raise InputError(f"unknown mode {mode!r}")


def _adjacency(G):
    return [
        [1 if G.has_edge(i, j) else 0 for j in range(G.n)] for i in range(G.n)
    ]


def _perm_diff(AG, AH, sigma):
    n = len(AG)
    return [
        [AG[sigma[i]][sigma[j]] - AH[i][j] for j in range(n)] for i in range(n)
    ]


def _exact_cut_value(rows, K, L):
    hi, lo = _cut_extrema(rows, K)
    return Fraction(max(hi, -lo), L * K * K)


def _all_perms_min(Aint, Bint, K):
    """Exact min over all K! alignments of the scaled cut value.

    Vectorized: difference tensors for every permutation at once, then a
    Gray-code sweep over row subsets with greedy columns.
    """
    perms = np.array(list(permutations(range(K))), dtype=np.intp)
    A = np.array(Aint, dtype=np.int64)
    B = np.array(Bint, dtype=np.int64)
    D = A[perms[:, :, None], perms[:, None, :]] - B[None, :, :]
    nperm = len(perms)
    cs = np.zeros((nperm, K), dtype=np.int64)
    best = np.zeros(nperm, dtype=np.int64)
    prev = 0
    for s in range(1, 2 ** K):
        gray = s ^ (s >> 1)
        bit = (gray ^ prev).bit_length() - 1
        prev = gray
        if (gray >> bit) & 1:
            cs += D[:, bit, :]
        else:
            cs -= D[:, bit, :]
        pos = np.where(cs > 0, cs, 0).sum(axis=1)
        neg = np.where(cs < 0, cs, 0).sum(axis=1)
        np.maximum(best, pos, out=best)
        np.maximum(best, -neg, out=best)
    w = int(np.argmin(best))
    return int(best[w]), tuple(int(x) for x in perms[w])


def _sorted_row_keys(rows):
    return [tuple(sorted(row)) for row in rows]


def _match_perm(keys_a, keys_b):
    """Permutation sending sorted ranks of b onto sorted ranks of a."""
    K = len(keys_a)
    ord_a = sorted(range(K), key=lambda i: (keys_a[i], i))
    ord_b = sorted(range(K), key=lambda i: (keys_b[i], i))
    sigma = [0] * K
    for r in range(K):
        sigma[ord_b[r]] = ord_a[r]
    return tuple(sigma)


class _Budget:
    def __init__(self, total):
        self.left = total

    def take(self, n=1):
        if self.left < n:
            return False
        self.left -= n
        return True


def _descent(evaluate, sigma, K, budget, rs, restarts):
    """Steepest descent over transpositions; every evaluate() costs budget."""
    best_val, best_sigma = evaluate(sigma), tuple(sigma)
    for r in range(restarts + 1):
        if r > 0:
            if not budget.take():
                break
            cur = list(range(K))
            rs.shuffle(cur)
            cur_val = evaluate(tuple(cur))
        else:
            cur, cur_val = list(sigma), best_val
        improved = True
        while improved and budget.left > 0:
            improved = False
            step_val, step_swap = cur_val, None
            for i in range(K):
                for j in range(i + 1, K):
                    if not budget.take():
                        break
                    cur[i], cur[j] = cur[j], cur[i]
                    v = evaluate(tuple(cur))
                    cur[i], cur[j] = cur[j], cur[i]
                    if v < step_val:
                        step_val, step_swap = v, (i, j)
                else:
                    continue
                break
            if step_swap is not None:
                i, j = step_swap
                cur[i], cur[j] = cur[j], cur[i]
                cur_val = step_val
                improved = True
        if cur_val < best_val:
            best_val, best_sigma = cur_val, tuple(cur)
    return best_val, best_sigma


def hat_delta(G, H, mode="exact", budget=2000, seed=0, restarts=16):
    """Alignment cut distance between two graphs on the same vertex count.

    Exact mode enumerates all |V|! permutations (|V| <= 8 only) and returns
    lower = upper = the minimum. Heuristic mode runs steepest descent over
    transpositions with seeded restarts; the result is an achieved upper
    bound with witness, and lower is 0.
    """
    if G.n != H.n:
        raise SizeMismatch(f"vertex counts differ: {G.n} vs {H.n}")
    n = G.n
    AG, AH = _adjacency(G), _adjacency(H)
    if mode == "exact":
        if n > HAT_EXACT_LIMIT:
            raise ExactTooLarge(
                f"{n}! permutations exceed the exact limit ({HAT_EXACT_LIMIT}!)"
            )
        if n == 1:
            return DeltaBound(Fraction(0), Fraction(0), (1, (0,)))
        best, sigma = _all_perms_min(AG, AH, n)
        val = Fraction(best, n * n)
        return DeltaBound(val, val, (1, sigma))
    if mode != "heuristic":
        raise InputError(f"unknown mode {mode!r}")

    def evaluate(sigma):
        return _exact_cut_value(_perm_diff(AG, AH, sigma), n, 1)

    bud = _Budget(budget)
    rs = RandomSource(seed)
    start = _match_perm(_sorted_row_keys(AG), _sorted_row_keys(AH))
    cand = [(evaluate(tuple(range(n))), tuple(range(n)))]
    if bud.take():
        cand.append((evaluate(start), start))
    base_val, base_sigma = min(cand)
    val, sigma = _descent(evaluate, base_sigma, n, bud, rs, restarts)
    if base_val < val:
        val, sigma = base_val, base_sigma
    return DeltaBound(Fraction(0), val, (1, sigma))


def _iroot_ceil(x, r):
    """Smallest integer y with y**r >= x, for x >= 0."""
    if x <= 0:
        return 0
    y = max(1, int(round(x ** (1.0 / r))))
    while y ** r < x:
        y += 1
    while y > 1 and (y - 1) ** r >= x:
        y -= 1
    return y


def _certified_upper(rows, K, L):
    """Certified upper bound on the cut value of a scaled symmetric matrix.

    min over: Gershgorin and trace-power bounds on the top singular value
    (|1_S D 1_T| <= sigma * K), the L1 cap, and 1. The trace of D**(2m) is
    accumulated in exact integer arithmetic from float64 powers whose
    entries stay below 2**53.
    """
    total_abs = sum(abs(e) for row in rows for e in row)
    d1_cap = Fraction(total_abs, L * K * K)
    sigma_bound = max(sum(abs(e) for e in row) for row in rows)
    maxabs = max((abs(e) for row in rows for e in row), default=0)
    if maxabs and maxabs * K * maxabs < 2 ** 53:
        Df = np.array(rows, dtype=np.float64)
        power = Df.copy()
        ebound = maxabs
        m = 1
        while True:
            nb = ebound * K * maxabs
            if nb >= 2 ** 53 or m >= 12:
                break
            power = power @ Df
            ebound = nb
            m += 1
            tr = sum(int(v) * int(v) for v in power.ravel().tolist())
            sigma_bound = min(sigma_bound, _iroot_ceil(tr, 2 * m))
    return min(Fraction(sigma_bound, L * K), d1_cap, Fraction(1))


def _unique_profiles(rows):
    profiles, slots = [], []
    seen = {}
    for i, row in enumerate(rows):
        t = tuple(row)
        if t not in seen:
            seen[t] = len(profiles)
            profiles.append(t)
            slots.append([])
        slots[seen[t]].append(i)
    return profiles, slots


def _profile_perms(rows_ref, rows_other, K, rounds=3):
    """Assign each part of the other graphon to a reference profile group.

    Scores live in the other side's own column labeling: the model value at
    column c for a row assigned to group q is the group-block value against
    c's currently assigned group, so the fit is refined over a few rounds.
    A spectral split seeds the two-group case, in both orientations; more
    groups start from the greedy positional fit.
    """
    profiles, slots = _unique_profiles(rows_ref)
    Q = len(profiles)
    if Q > 8:
        return []
    if Q == 1:
        return [tuple(range(K))]
    X = np.array(rows_other, dtype=np.float64)
    # block value between group q and group r, read off any representative
    B = np.array(
        [[profiles[q][slots[r][0]] for r in range(Q)] for q in range(Q)],
        dtype=np.float64,
    )
    caps = [len(s) for s in slots]

    def assign_from(scores):
        # most-regretful rows pick first, under group capacities
        ranked = np.sort(scores, axis=1)
        order = np.argsort(-(ranked[:, 1] - ranked[:, 0]), kind="stable")
        left = list(caps)
        assign = [-1] * K
        for i in order:
            for q in np.argsort(scores[i], kind="stable"):
                if left[int(q)] > 0:
                    left[int(q)] -= 1
                    assign[int(i)] = int(q)
                    break
        return assign

    def refine(assign):
        for _ in range(rounds):
            model = B[:, assign]
            scores = ((X[:, None, :] - model[None, :, :]) ** 2).sum(axis=2)
            assign = assign_from(scores)
        return assign

    starts = []
    if Q == 2:
        centered = X - X.mean()
        w, v = np.linalg.eigh(centered)
        lead = v[:, -1] if abs(w[-1]) >= abs(w[0]) else v[:, 0]
        order = np.argsort(lead, kind="stable")
        for flip in (False, True):
            assign = [0] * K
            ranked = order[::-1] if flip else order
            for pos, i in enumerate(ranked):
                assign[int(i)] = 0 if pos < caps[0] else 1
            starts.append(assign)
    else:
        P = np.array(profiles, dtype=np.float64)
        starts.append(assign_from(((X[:, None, :] - P[None, :, :]) ** 2).sum(axis=2)))

    out = []
    for start in starts:
        assign = refine(start)
        cur = [list(slots[q]) for q in range(Q)]
        out.append(tuple(cur[q].pop(0) for q in assign))
    return out


def _tie_block_perms(keys, base_order, cap):
    """All reorderings of a sorted part order within equal-key blocks."""
    blocks = []
    i = 0
    while i < len(base_order):
        j = i
        while j < len(base_order) and keys[base_order[j]] == keys[base_order[i]]:
            j += 1
        blocks.append(base_order[i:j])
        i = j
    count = 1
    for b in blocks:
        count *= factorial(len(b))
        if count > cap:
            return [base_order]
    outs = [[]]
    for b in blocks:
        outs = [o + list(p) for o in outs for p in permutations(b)]
    return outs


def _canonical_perms(rows_u, rows_v, K, cap):
    keys_u, keys_v = _sorted_row_keys(rows_u), _sorted_row_keys(rows_v)
    ord_v = sorted(range(K), key=lambda i: (keys_v[i], i))
    base_u = sorted(range(K), key=lambda i: (keys_u[i], i))
    sigmas = []
    for ord_u in _tie_block_perms(keys_u, base_u, cap):
        sigma = [0] * K
        for r in range(K):
            sigma[ord_v[r]] = ord_u[r]
        sigmas.append(tuple(sigma))
    return sigmas


def _counting_lower(U, V, vertex_limit, cost_limit):
    """Largest density-gap bound over small graphs: |t gap| / (4 C(n,2))."""
    best = Fraction(0)
    i = 1
    while True:
        F = enumerate_graph(i)
        if F.n > vertex_limit:
            break
        try:
            gap = abs(
                t_ind_exact(F, U, cost_limit) - t_ind_exact(F, V, cost_limit)
            )
        except InputError:
            i += 1
            continue
        best = max(best, gap / (4 * comb(F.n, 2)))
        i += 1
    return best


def delta_bound(
    U,
    V,
    blowup_limit=1,
    budget=10 ** 4,
    seed=0,
    exact_refinement_limit=ALIGN_EXACT_LIMIT,
    lower_vertex_limit=4,
    cost_limit=COST_LIMIT,
):
    """Two-sided bracket on the alignment cut distance between graphons.

    The lower bound inverts the density counting bound over all enumerated
    graphs with at most lower_vertex_limit vertices. The upper bound is the
    best aligned cut distance found within the candidate budget: on common
    refinements of at most exact_refinement_limit parts every evaluation is
    an exact cut norm (full permutation enumeration when the budget covers
    K!, otherwise sorted-profile matching plus steepest descent); on larger
    refinements candidates are scored with certified spectral and L1 upper
    bounds, so the bracket stays valid but carries no witness.
    """
    if blowup_limit < 1:
        raise InputError(f"blow-up limit must be positive, got {blowup_limit}")
    U, V = reduce_step_graphon(U), reduce_step_graphon(V)
    lower = _counting_lower(U, V, lower_vertex_limit, cost_limit)
    rs = RandomSource(seed)
    bud = _Budget(budget)
    upper, witness = Fraction(1), None
    for m in range(1, blowup_limit + 1):
        if m > 1 and bud.left <= 0:
            break
        K = m * lcm(U.k, V.k)
        Ur = blow_up(U, K // U.k)
        Vr = blow_up(V, K // V.k)
        ru, rv, L = _scaled_rows([Ur.values, Vr.values])
        if K <= exact_refinement_limit:

            def evaluate(sigma, ru=ru, rv=rv, K=K, L=L):
                rows = [
                    [ru[sigma[i]][sigma[j]] - rv[i][j] for j in range(K)]
                    for i in range(K)
                ]
                return _exact_cut_value(rows, K, L)

            if factorial(K) <= bud.left:
                bud.take(factorial(K))
                best_int, sigma = _all_perms_min(ru, rv, K)
                val = Fraction(best_int, L * K * K)
                if val < upper:
                    upper, witness = val, (m, sigma)
                continue
            cands = [tuple(range(K))]
            cands += _canonical_perms(ru, rv, K, cap=min(720, bud.left))
            best_val, best_sigma = None, None
            for sigma in dict.fromkeys(cands):
                if not bud.take():
                    break
                v = evaluate(sigma)
                if best_val is None or v < best_val:
                    best_val, best_sigma = v, sigma
            if best_val is None:
                continue
            val, sigma = _descent(
                evaluate, best_sigma, K, bud, rs, restarts=3
            )
            if best_val < val:
                val, sigma = best_val, best_sigma
            if val < upper:
                upper, witness = val, (m, sigma)
        else:
            cands = [tuple(range(K))]
            cands += _canonical_perms(ru, rv, K, cap=1)
            cands += _profile_perms(ru, rv, K)
            for sigma in dict.fromkeys(cands):
                if not bud.take():
                    break
                rows = [
                    [ru[sigma[i]][sigma[j]] - rv[i][j] for j in range(K)]
                    for i in range(K)
                ]
                val = _certified_upper(rows, K, L)
                if val < upper:
                    upper, witness = val, None
    return DeltaBound(lower, upper, witness)


def d_w_truncated(U, V, N, cost_limit=COST_LIMIT):
    """Truncated enumeration metric plus a certified tail bound.

    value = sum over i < N of 2**-i times the t_ind gap at the i-th
    enumerated graph; tail = 2**-(N-1) bounds the omitted terms since every
    gap is at most 1.
    """
    if N < 1:
        raise InputError(f"truncation length must be positive, got {N}")
    value = Fraction(0)
    for i in range(N):
        F = enumerate_graph(i)
        gap = abs(t_ind_exact(F, U, cost_limit) - t_ind_exact(F, V, cost_limit))
        value += Fraction(1, 2 ** i) * gap
    return value, Fraction(1, 2 ** (N - 1))
