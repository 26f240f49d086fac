"""Testers for properties of functions on a line [n].

The first half of the module is bound bookkeeping: a pair of per-step bound
functions (lower, upper) describes a bounded-derivative property, with
monotonicity as the one-sided special case lower = 0, upper = +inf.  Segment
sums evaluate in extended-real arithmetic; lower entries may be -inf and upper
entries +inf, so a directed sum never mixes opposite infinities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ERASED,
    ALL_CHECKS_PASSED,
    BUDGET_EXHAUSTED,
    Box,
    BudgetExhausted,
    Domain,
    ErasedFunction,
    QueryOracle,
    Verdict,
    ceil_frac,
    exact_fraction,
    exact_log2,
    sample_nonerased_uniform,
    value_gt,
)

INF = float("inf")


def _prefix_with_inf(entries, sign):
    """Prefix sums of the finite entries plus a prefix count of infinities.

    ``sign`` is the only infinity each side may carry: -1 for lower bounds,
    +1 for upper bounds.
    """
    finite = [0]
    inf_count = [0]
    for e in entries:
        if isinstance(e, float) and math.isinf(e):
            if (e > 0) != (sign > 0):
                raise ValueError(f"bound entry {e} has the wrong sign")
            finite.append(finite[-1])
            inf_count.append(inf_count[-1] + 1)
        else:
            finite.append(finite[-1] + e)
            inf_count.append(inf_count[-1])
    return finite, inf_count


class LineBoundingPair:
    """Step bounds (lower, upper) on [n-1] with lower(i) < upper(i).

    A total g on [n] satisfies the property iff
    lower(i) <= g(i+1) - g(i) <= upper(i) for every step i.
    """

    __slots__ = ("lower", "upper", "_lo_pre", "_lo_inf", "_up_pre", "_up_inf")

    def __init__(self, lower, upper):
        lower = tuple(lower)
        upper = tuple(upper)
        if len(lower) != len(upper):
            raise ValueError("lower and upper must have equal length")
        for l, u in zip(lower, upper):
            if not value_gt(u, l):
                raise ValueError(f"need lower < upper, got {l} vs {u}")
        self.lower = lower
        self.upper = upper
        self._lo_pre, self._lo_inf = _prefix_with_inf(lower, -1)
        self._up_pre, self._up_inf = _prefix_with_inf(upper, +1)

    @property
    def n(self) -> int:
        return len(self.lower) + 1

    @classmethod
    def monotone(cls, n: int) -> "LineBoundingPair":
        return cls([0] * (n - 1), [INF] * (n - 1))

    @classmethod
    def lipschitz(cls, n: int, c=1) -> "LineBoundingPair":
        return cls([-c] * (n - 1), [c] * (n - 1))

    @property
    def all_finite(self) -> bool:
        return self._lo_inf[-1] == 0 and self._up_inf[-1] == 0

    def seg_lower(self, a: int, b: int):
        """Sum of lower(t) for t in [a, b); -inf if the segment holds one."""
        if not 1 <= a <= b <= self.n:
            raise ValueError(f"bad segment [{a}, {b})")
        if self._lo_inf[b - 1] - self._lo_inf[a - 1] > 0:
            return -INF
        return self._lo_pre[b - 1] - self._lo_pre[a - 1]

    def seg_upper(self, a: int, b: int):
        if not 1 <= a <= b <= self.n:
            raise ValueError(f"bad segment [{a}, {b})")
        if self._up_inf[b - 1] - self._up_inf[a - 1] > 0:
            return INF
        return self._up_pre[b - 1] - self._up_pre[a - 1]


def violates_lower(bounds: LineBoundingPair, a: int, fa, b: int, fb) -> bool:
    """For a < b: does the pair drop faster than the lower bounds allow,
    i.e. f(a) - f(b) > -sum of lower over [a, b)."""
    s = bounds.seg_lower(a, b)
    if s == -INF:
        return False
    return value_gt(fa - fb, -s)


def violates_upper(bounds: LineBoundingPair, a: int, fa, b: int, fb) -> bool:
    """For a < b: does the pair rise faster than the upper bounds allow."""
    s = bounds.seg_upper(a, b)
    if s == INF:
        return False
    return value_gt(fb - fa, s)


def pair_violates(bounds: LineBoundingPair, a: int, fa, b: int, fb) -> bool:
    return violates_lower(bounds, a, fa, b, fb) or violates_upper(bounds, a, fa, b, fb)


def bdp_to_monotone_transforms(bounds: LineBoundingPair):
    """Value maps (G, H) such that a pair violates the bounded-derivative
    property iff it violates monotonicity under G or under H.

    G(i, v) = v + sum of lower over [i, n); H(i, v) = -v - sum of upper over
    [i, n).  These equal the half-sum recentering followed by the symmetric
    slack subtraction, folded into one shift per side.  Requires finite bounds.
    """
    if not bounds.all_finite:
        raise ValueError("transforms need finite bounds on every step")
    n = bounds.n
    lo_suffix = [bounds.seg_lower(i, n) for i in range(1, n + 1)]
    up_suffix = [bounds.seg_upper(i, n) for i in range(1, n + 1)]

    def g_map(i, v):
        return v + lo_suffix[i - 1]

    def h_map(i, v):
        return -v - up_suffix[i - 1]

    return g_map, h_map


# ---------------------------------------------------------------------------
# testers

def _params(eps, alpha):
    e, a = exact_fraction(eps), exact_fraction(alpha)
    if not 0 < e < 1:
        raise ValueError(f"proximity parameter {eps!r} outside (0,1)")
    if not 0 <= a < 1:
        raise ValueError(f"erasure bound {alpha!r} outside [0,1)")
    return e, a


def monotone_line_budget(n: int, eps, alpha) -> int:
    e, a = _params(eps, alpha)
    return ceil_frac(60 * exact_log2(n) / (e * (1 - a)))


def convex_line_budget(n: int, eps, alpha) -> int:
    e, a = _params(eps, alpha)
    return ceil_frac(180 * exact_log2(n) / (e * (1 - a)))


def bdp_line_budget(n: int, eps, alpha) -> int:
    """Two monotonicity searches at proximity eps/4 share one budget."""
    e, a = _params(eps, alpha)
    return 2 * ceil_frac(60 * exact_log2(n) / ((e / 4) * (1 - a)))


def proximity_iterations(eps) -> int:
    return ceil_frac(2 / exact_fraction(eps))


def one_sixth_iterations(eps) -> int:
    """Repetitions driving one view's miss probability below 1/6:
    (1 - eps/4)^t <= exp(-t*eps/4) <= 1/6 at t = 4 ln 6 / eps."""
    return ceil_frac(Fraction(4 * math.log(6)) / exact_fraction(eps))


def _line_domain(oracle: QueryOracle) -> int:
    if not oracle.fn.domain.is_line:
        raise ValueError("this tester runs on line domains")
    return oracle.fn.domain.n


def randomized_binary_search_step_loop(oracle, lo, hi, s, fs, rng, on_pivot):
    """One random search path for s: sample a nonerased pivot m from the
    current interval, let on_pivot(m, fm, side) inspect it (side is "right"
    when m lies right of s), halve toward s, stop when the pivot is s itself.
    Returns the first payload on_pivot yields, or None for a clean pass."""
    l, r = lo, hi
    while l <= r:
        if l == r:
            # the interval always contains s, so a singleton is s itself;
            # drawing the forced pivot would add a query and check nothing
            return None
        (m,), fm = sample_nonerased_uniform(oracle, Box((l,), (r,)), rng)
        if s < m:
            r = m - 1
            hit = on_pivot(m, fm, "right")
        elif s > m:
            l = m + 1
            hit = on_pivot(m, fm, "left")
        else:
            return None
        if hit is not None:
            return hit
    return None


def test_monotone_line(oracle: QueryOracle, eps, alpha, rng) -> Verdict:
    """Accepts every function with a monotone restoration; rejects functions
    whose every restoration is eps-far on the nonerased points with
    probability at least 2/3.  Reject verdicts carry the violated pair."""
    n = _line_domain(oracle)
    e, a = _params(eps, alpha)
    oracle.set_budget(monotone_line_budget(n, e, a))
    box = Box.whole(oracle.fn.domain)
    try:
        for _ in range(proximity_iterations(e)):
            (s,), fs = sample_nonerased_uniform(oracle, box, rng)

            def on_pivot(m, fm, side):
                if side == "right" and value_gt(fs, fm):
                    return ((s, fs), (m, fm))
                if side == "left" and value_gt(fm, fs):
                    return ((m, fm), (s, fs))
                return None

            hit = randomized_binary_search_step_loop(oracle, 1, n, s, fs, rng, on_pivot)
            if hit is not None:
                return Verdict.rejected(("monotone-violation",) + hit, oracle.count)
    except BudgetExhausted:
        return Verdict.accepted(BUDGET_EXHAUSTED, oracle.count)
    return Verdict.accepted(ALL_CHECKS_PASSED, oracle.count)


def _search_bdp_direct(oracle, bounds, lo, hi, s, fs, rng):
    def on_pivot(m, fm, side):
        a, fa, b, fb = (s, fs, m, fm) if side == "right" else (m, fm, s, fs)
        if pair_violates(bounds, a, fa, b, fb):
            return ((a, fa), (b, fb))
        return None

    return randomized_binary_search_step_loop(oracle, lo, hi, s, fs, rng, on_pivot)


def test_bdp_line(oracle: QueryOracle, bounds: LineBoundingPair, eps, alpha, rng) -> Verdict:
    """Bounded-derivative tester via two monotonicity views.

    With finite bounds, value maps G and H turn derivative violations into
    monotonicity violations; each view gets a search loop at proximity eps/4
    with enough repetitions for a 1/6 miss bound, so the union misses with
    probability at most 1/3.  One-sided-infinite bounds skip the maps and
    check the directed segment sums on the search path directly.
    """
    n = _line_domain(oracle)
    e, a = _params(eps, alpha)
    if bounds.n != n:
        raise ValueError("bounds length does not match the domain")
    box = Box.whole(oracle.fn.domain)

    if not bounds.all_finite:
        oracle.set_budget(monotone_line_budget(n, e, a))
        try:
            for _ in range(proximity_iterations(e)):
                (s,), fs = sample_nonerased_uniform(oracle, box, rng)
                hit = _search_bdp_direct(oracle, bounds, 1, n, s, fs, rng)
                if hit is not None:
                    return Verdict.rejected(("bdp-violation",) + hit, oracle.count)
        except BudgetExhausted:
            return Verdict.accepted(BUDGET_EXHAUSTED, oracle.count)
        return Verdict.accepted(ALL_CHECKS_PASSED, oracle.count)

    g_map, h_map = bdp_to_monotone_transforms(bounds)
    oracle.set_budget(bdp_line_budget(n, e, a))
    reps = one_sixth_iterations(e)
    try:
        for vmap in (g_map, h_map):
            for _ in range(reps):
                (s,), fs = sample_nonerased_uniform(oracle, box, rng)
                vs = vmap(s, fs)

                def on_pivot(m, fm, side):
                    vm = vmap(m, fm)
                    if side == "right" and value_gt(vs, vm):
                        return ((s, fs), (m, fm))
                    if side == "left" and value_gt(vm, vs):
                        return ((m, fm), (s, fs))
                    return None

                hit = randomized_binary_search_step_loop(oracle, 1, n, s, fs, rng, on_pivot)
                if hit is None:
                    continue
                (pa, fa), (pb, fb) = hit
                # reject on the original values, not the view: certificates
                # must hold against the raw function under exact recheck
                if pair_violates(bounds, pa, fa, pb, fb):
                    return Verdict.rejected(("bdp-violation", (pa, fa), (pb, fb)),
                                            oracle.count)
    except BudgetExhausted:
        return Verdict.accepted(BUDGET_EXHAUSTED, oracle.count)
    return Verdict.accepted(ALL_CHECKS_PASSED, oracle.count)


# ---------------------------------------------------------------------------
# convexity

NEG_INF = float("-inf")


def _chord_slope(chord):
    (a, fa), (b, fb) = chord
    num = fb - fa
    if isinstance(num, (int, Fraction)):
        return Fraction(num, b - a)
    return num / (b - a)


@dataclass(frozen=True)
class IntervalFrame:
    """One level of the convexity search.

    ``anchors`` are already-queried nonerased (position, value) pairs inside
    [lo, hi]; the slope bounds come with the chords that produced them
    (``None`` chord = unbounded side) so reject certificates can name
    concrete points.
    """

    lo: int
    hi: int
    anchors: tuple
    left_slope: object
    right_slope: object
    search_point: int
    search_value: object
    left_chord: tuple = None
    right_chord: tuple = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")
        if not self.lo <= self.search_point <= self.hi:
            raise ValueError("search point outside the interval")
        for pos, _ in self.anchors:
            if not self.lo <= pos <= self.hi:
                raise ValueError("anchor outside the interval")


def _walk_nonerased(oracle, start, stop, step):
    """Linear scan start, start+step, ... within [min,max]=sorted((start,stop));
    returns (pos, value) of the first nonerased point or None."""
    pos = start
    while (pos <= stop) if step > 0 else (pos >= stop):
        v = oracle.query((pos,))
        if v is not ERASED:
            return pos, v
        pos += step
    return None


def test_interval(frame: IntervalFrame, oracle: QueryOracle, rng, counters=None) -> object:
    """Recursive goodness check, run iteratively (each loop pass is one
    recursion level; only the side holding the search point recurses).

    Per level: sample a nonerased pivot x (sampling queries), walk outward
    for the nearest nonerased neighbors y right and z left (walking queries),
    merge {z, x, y} into the anchors, and test that the slopes over the
    merged list fit between the inherited slope bounds.  Descends with the
    anchors on the search side of x, which include the walked neighbor on
    that side, and with the chord (z,x) or (x,y) as the new bound.

    Returns None (accept) or a certificate ("convex-violation", chord_a,
    chord_b) where chord_a sits left of chord_b but has the larger slope.
    """
    if counters is None:
        counters = {"sampling": 0, "walking": 0}
    while True:
        before = oracle.count
        (x,), fx = sample_nonerased_uniform(
            oracle, Box((frame.lo,), (frame.hi,)), rng)
        counters["sampling"] += oracle.count - before

        before = oracle.count
        right = _walk_nonerased(oracle, x + 1, frame.hi, +1)
        left = _walk_nonerased(oracle, x - 1, frame.lo, -1)
        counters["walking"] += oracle.count - before

        merged = {pos: val for pos, val in frame.anchors}
        merged[x] = fx
        for hit in (right, left):
            if hit is not None:
                merged[hit[0]] = hit[1]
        anchor_list = sorted(merged.items())

        chain = []
        if frame.left_chord is not None:
            chain.append((frame.left_slope, frame.left_chord))
        for (a, fa), (b, fb) in zip(anchor_list, anchor_list[1:]):
            chord = ((a, fa), (b, fb))
            chain.append((_chord_slope(chord), chord))
        if frame.right_chord is not None:
            chain.append((frame.right_slope, frame.right_chord))
        for (s1, c1), (s2, c2) in zip(chain, chain[1:]):
            if value_gt(s1, s2):
                return ("convex-violation", c1, c2)

        s = frame.search_point
        if s == x:
            return None
        if s < x:
            z, fz = left  # s itself is a nonerased point below x
            chord = ((z, fz), (x, fx))
            frame = IntervalFrame(
                frame.lo, z,
                tuple(item for item in anchor_list if item[0] < x),
                frame.left_slope, _chord_slope(chord),
                s, frame.search_value,
                frame.left_chord, chord)
        else:
            y, fy = right
            chord = ((x, fx), (y, fy))
            frame = IntervalFrame(
                y, frame.hi,
                tuple(item for item in anchor_list if item[0] > x),
                _chord_slope(chord), frame.right_slope,
                s, frame.search_value,
                chord, frame.right_chord)


def test_convex_line(oracle: QueryOracle, eps, alpha, rng) -> Verdict:
    """Accepts every function with a convex restoration; rejects functions
    whose every restoration is eps-far on the nonerased points with
    probability at least 2/3.  Verdict stats carry the sampling/walking
    query split."""
    n = _line_domain(oracle)
    e, a = _params(eps, alpha)
    if oracle.fn.kind != "real":
        raise ValueError("convexity is tested for real-valued functions")
    oracle.set_budget(convex_line_budget(n, e, a))
    box = Box.whole(oracle.fn.domain)
    counters = {"sampling": 0, "walking": 0}
    try:
        for _ in range(proximity_iterations(e)):
            before = oracle.count
            (s,), fs = sample_nonerased_uniform(oracle, box, rng)
            counters["sampling"] += oracle.count - before
            frame = IntervalFrame(1, n, (), NEG_INF, INF, s, fs)
            cert = test_interval(frame, oracle, rng, counters)
            if cert is not None:
                return Verdict.rejected(cert, oracle.count, stats=dict(counters))
    except BudgetExhausted:
        return Verdict.accepted(BUDGET_EXHAUSTED, oracle.count, stats=dict(counters))
    return Verdict.accepted(ALL_CHECKS_PASSED, oracle.count, stats=dict(counters))


# ---------------------------------------------------------------------------
# certificate checking against the raw function

def check_line_certificate(fn: ErasedFunction, certificate,
                           bounds: LineBoundingPair = None) -> bool:
    """Validates a reject certificate against the function itself, outside
    any oracle.  False means the certificate is bogus."""
    kind = certificate[0]
    if kind == "monotone-violation":
        (a, fa), (b, fb) = certificate[1], certificate[2]
        return (a < b and fn.value_at((a,)) == fa and fn.value_at((b,)) == fb
                and value_gt(fa, fb))
    if kind == "bdp-violation":
        (a, fa), (b, fb) = certificate[1], certificate[2]
        return (a < b and fn.value_at((a,)) == fa and fn.value_at((b,)) == fb
                and pair_violates(bounds, a, fa, b, fb))
    if kind == "convex-violation":
        c1, c2 = certificate[1], certificate[2]
        for (p, fp) in (*c1, *c2):
            if fn.value_at((p,)) != fp:
                return False
        (a, _), (b, _) = c1
        (c, _), (d, _) = c2
        if not (a < b and c < d and a <= c and b <= d and (a, b) != (c, d)):
            return False
        return value_gt(_chord_slope(c1), _chord_slope(c2))
    return False
