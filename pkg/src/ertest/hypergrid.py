"""Testers on [n]^d via reduction to axis-parallel lines.

A bounding family gives each dimension its own per-step bound pair; the
induced quasi-metric m_B caps how much f may rise from y to x.  Testing
samples a uniform axis line and runs one line search on it; the proximity
and budget formulas account for how distance and erasures spread across
lines.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ALL_CHECKS_PASSED,
    BUDGET_EXHAUSTED,
    Box,
    BudgetExhausted,
    Domain,
    ErasedFunction,
    PreconditionViolated,
    QueryOracle,
    Verdict,
    ceil_frac,
    exact_fraction,
    exact_log2,
    sample_nonerased_uniform,
    value_gt,
)
from .line import (
    INF,
    LineBoundingPair,
    bdp_to_monotone_transforms,
    pair_violates,
    randomized_binary_search_step_loop,
)


@dataclass(frozen=True)
class BoundingFamily:
    """One bound pair per dimension; dimension r uses per_dim[r-1]."""

    per_dim: tuple

    def __post_init__(self):
        if not self.per_dim:
            raise ValueError("need at least one dimension")
        n = self.per_dim[0].n
        if any(b.n != n for b in self.per_dim):
            raise ValueError("all dimensions must share one side length")

    @property
    def d(self) -> int:
        return len(self.per_dim)

    @property
    def n(self) -> int:
        return self.per_dim[0].n

    @classmethod
    def monotone(cls, n: int, d: int) -> "BoundingFamily":
        return cls(tuple(LineBoundingPair.monotone(n) for _ in range(d)))

    @classmethod
    def lipschitz(cls, n: int, d: int, c=1) -> "BoundingFamily":
        return cls(tuple(LineBoundingPair.lipschitz(n, c) for _ in range(d)))

    def pair_violates(self, x: tuple, fx, y: tuple, fy) -> bool:
        return grid_pair_violates(self, x, fx, y, fy)


def quasi_metric(family: BoundingFamily, x: tuple, y: tuple):
    """Largest allowed value of f(x) - f(y): upper sums where x runs above y,
    minus lower sums where it runs below.  Extended real; never -inf."""
    up = 0
    low = 0
    for r, (xr, yr) in enumerate(zip(x, y)):
        b = family.per_dim[r]
        if xr > yr:
            s = b.seg_upper(yr, xr)
            if s == INF:
                return INF
            up += s
        elif xr < yr:
            s = b.seg_lower(xr, yr)
            if s == -INF:
                return INF
            low += s
    return up - low


def grid_pair_violates(family: BoundingFamily, x: tuple, fx, y: tuple, fy) -> bool:
    """True iff f(x) - f(y) > m_B(x, y) or f(y) - f(x) > m_B(y, x)."""
    m_xy = quasi_metric(family, x, y)
    if m_xy != INF and value_gt(fx - fy, m_xy):
        return True
    m_yx = quasi_metric(family, y, x)
    return m_yx != INF and value_gt(fy - fx, m_yx)


def is_member_bdp(values: dict, family: BoundingFamily) -> bool:
    """Pairwise membership check for a total function on any sub-domain,
    given as {point: value}."""
    items = list(values.items())
    for (x, fx), (y, fy) in itertools.combinations(items, 2):
        if grid_pair_violates(family, x, fx, y, fy):
            return False
    return True


# ---------------------------------------------------------------------------
# axis lines

@dataclass(frozen=True)
class AxisLine:
    """The line along ``axis`` (1-based) with the other coordinates fixed,
    listed in increasing dimension order."""

    axis: int
    fixed: tuple

    def point(self, pos: int) -> tuple:
        return self.fixed[:self.axis - 1] + (pos,) + self.fixed[self.axis - 1:]


def all_axis_lines(domain: Domain):
    for axis in range(1, domain.d + 1):
        for fixed in itertools.product(range(1, domain.n + 1), repeat=domain.d - 1):
            yield AxisLine(axis, fixed)


def sample_axis_line(domain: Domain, rng) -> AxisLine:
    """Uniform over all d * n^(d-1) axis-parallel lines."""
    axis = rng.randint(1, domain.d)
    fixed = tuple(rng.randint(1, domain.n) for _ in range(domain.d - 1))
    return AxisLine(axis, fixed)


class _AxisLineView:
    """Presents one axis line of a grid oracle as a line oracle: queries at
    line position p hit the underlying grid point, budget shared."""

    __slots__ = ("oracle", "line")

    def __init__(self, oracle: QueryOracle, line: AxisLine):
        self.oracle = oracle
        self.line = line

    def query(self, pt):
        return self.oracle.query(self.line.point(pt[0]))


# ---------------------------------------------------------------------------
# testers

def _grid_params(oracle, eps, alpha, gate_factor: int):
    fn = oracle.fn
    n, d = fn.domain.n, fn.domain.d
    e, a = exact_fraction(eps), exact_fraction(alpha)
    if not 0 < e < 1:
        raise ValueError(f"proximity parameter {eps!r} outside (0,1)")
    if not 0 <= a < 1:
        raise ValueError(f"erasure bound {alpha!r} outside [0,1)")
    if a > e / (gate_factor * d):
        raise PreconditionViolated(
            f"erasure bound {a} exceeds eps/{gate_factor}d = {e / (gate_factor * d)}")
    return n, d, e, a


def monotone_hypergrid_budget(n: int, d: int, eps, alpha) -> int:
    e, a = exact_fraction(eps), exact_fraction(alpha)
    return ceil_frac(1200 * d * exact_log2(n) / (e * (1 - a)))


def bdp_hypergrid_budget(n: int, d: int, eps, alpha) -> int:
    e, a = exact_fraction(eps), exact_fraction(alpha)
    return ceil_frac(4800 * d * exact_log2(n) / (e * (1 - a)))


def hypergrid_iterations(d: int, eps, alpha, factor: int) -> int:
    """ceil(factor * d / (eps(1-alpha) - 4 d alpha)); the precondition keeps
    the denominator positive."""
    e, a = exact_fraction(eps), exact_fraction(alpha)
    denom = e * (1 - a) - 4 * d * a
    if denom <= 0:
        raise PreconditionViolated("erasure bound too large for the iteration count")
    return ceil_frac(Fraction(factor * d) / denom)


def _sample_on_line(oracle, line: AxisLine, n: int, rng):
    lopt = line.point(1)
    hipt = line.point(n)
    box = Box(tuple(min(a, b) for a, b in zip(lopt, hipt)),
              tuple(max(a, b) for a, b in zip(lopt, hipt)))
    pt, v = sample_nonerased_uniform(oracle, box, rng)
    return pt[line.axis - 1], v


def test_monotone_hypergrid(oracle: QueryOracle, eps, alpha, rng) -> Verdict:
    """Per iteration: one uniform axis line, one nonerased start point on it,
    one randomized binary search along it; rejects on an observed violated
    pair.  One-sided."""
    n, d, e, a = _grid_params(oracle, eps, alpha, 250)
    oracle.set_budget(monotone_hypergrid_budget(n, d, e, a))
    try:
        for _ in range(hypergrid_iterations(d, e, a, 12)):
            line = sample_axis_line(oracle.fn.domain, rng)
            view = _AxisLineView(oracle, line)
            s, fs = _sample_on_line(oracle, line, n, rng)

            def on_pivot(m, fm, side):
                if side == "right" and value_gt(fs, fm):
                    return ((s, fs), (m, fm))
                if side == "left" and value_gt(fm, fs):
                    return ((m, fm), (s, fs))
                return None

            hit = randomized_binary_search_step_loop(view, 1, n, s, fs, rng, on_pivot)
            if hit is not None:
                (pa, fa), (pb, fb) = hit
                cert = ("monotone-violation", (line.point(pa), fa), (line.point(pb), fb))
                return Verdict.rejected(cert, oracle.count)
    except BudgetExhausted:
        return Verdict.accepted(BUDGET_EXHAUSTED, oracle.count)
    return Verdict.accepted(ALL_CHECKS_PASSED, oracle.count)


def test_bdp_hypergrid(oracle: QueryOracle, family: BoundingFamily,
                       eps, alpha, rng) -> Verdict:
    """Like the monotone grid tester, but the line check runs both
    transformed views of the sampled dimension's bounds (or the direct
    segment-sum check when that dimension has an infinite bound)."""
    n, d, e, a = _grid_params(oracle, eps, alpha, 970)
    if family.d != d or family.n != n:
        raise ValueError("bounding family does not match the domain")
    oracle.set_budget(bdp_hypergrid_budget(n, d, e, a))
    try:
        for _ in range(hypergrid_iterations(d, e, a, 48)):
            line = sample_axis_line(oracle.fn.domain, rng)
            bounds = family.per_dim[line.axis - 1]
            view = _AxisLineView(oracle, line)
            s, fs = _sample_on_line(oracle, line, n, rng)

            if bounds.all_finite:
                g_map, h_map = bdp_to_monotone_transforms(bounds)

                def on_pivot(m, fm, side):
                    pa, fa, pb, fb = (s, fs, m, fm) if side == "right" else (m, fm, s, fs)
                    for vmap in (g_map, h_map):
                        if value_gt(vmap(pa, fa), vmap(pb, fb)):
                            return ((pa, fa), (pb, fb))
                    return None
            else:
                def on_pivot(m, fm, side):
                    pa, fa, pb, fb = (s, fs, m, fm) if side == "right" else (m, fm, s, fs)
                    if pair_violates(bounds, pa, fa, pb, fb):
                        return ((pa, fa), (pb, fb))
                    return None

            hit = randomized_binary_search_step_loop(view, 1, n, s, fs, rng, on_pivot)
            if hit is None:
                continue
            (pa, fa), (pb, fb) = hit
            # reject only when the raw pair violates under exact recheck
            if pair_violates(bounds, pa, fa, pb, fb):
                cert = ("bdp-violation", (line.point(pa), fa), (line.point(pb), fb))
                return Verdict.rejected(cert, oracle.count)
    except BudgetExhausted:
        return Verdict.accepted(BUDGET_EXHAUSTED, oracle.count)
    return Verdict.accepted(ALL_CHECKS_PASSED, oracle.count)


def check_grid_certificate(fn: ErasedFunction, certificate,
                           family: BoundingFamily = None) -> bool:
    """Validates a grid reject certificate against the raw function."""
    kind = certificate[0]
    (x, fx), (y, fy) = certificate[1], certificate[2]
    if fn.value_at(x) != fx or fn.value_at(y) != fy:
        return False
    if kind == "monotone-violation":
        return fn.domain.comparable_le(x, y) and x != y and value_gt(fx, fy)
    if kind == "bdp-violation":
        return grid_pair_violates(family, x, fx, y, fy)
    return False
