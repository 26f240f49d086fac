"""Domains, partially erased functions, and the budgeted query oracle.

Points on a ``Domain`` are 1-based coordinate tuples.  A function value is
either a real number (int, float or Fraction), a bit, a field element, or the
erasure symbol ``ERASED``.  Testers read values only through ``QueryOracle``,
which counts every access and signals ``BudgetExhausted`` once the budget is
spent; testers translate that signal into an accepting verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

REL_TOL = 1e-9

VALUE_KINDS = ("real", "bit", "field")


class _Erased:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ERASED"

    def __reduce__(self):
        # pickling must preserve the singleton, identity checks rely on it
        return (_Erased, ())


ERASED = _Erased()


def is_erased(value) -> bool:
    return value is ERASED


class BudgetExhausted(Exception):
    """Signal, not an error: the oracle budget is spent.

    Testers catch it at the top level and accept (reason ``budget_exhausted``).
    """


class PreconditionViolated(ValueError):
    """A tester was called outside its stated parameter regime."""


class SizeLimit(ValueError):
    """An exact oracle was asked for an instance above its size gate."""


class GenerationFailed(RuntimeError):
    """An instance generator could not certify a sample within its retry cap."""


class ConfigError(ValueError):
    """Malformed experiment configuration or input file."""


class InvalidField(ValueError):
    """The claimed field modulus is not prime."""


def value_gt(a, b) -> bool:
    """Strict a > b.  Uses a relative tolerance when floats are involved so
    representation noise never flips a comparison; exact types compare exactly."""
    if isinstance(a, float) or isinstance(b, float):
        fa, fb = float(a), float(b)
        if fa == fb or math.isinf(fa) or math.isinf(fb):
            return fa > fb
        return fa - fb > REL_TOL * max(1.0, abs(fa), abs(fb))
    return a > b


def value_lt(a, b) -> bool:
    return value_gt(b, a)


def exact_fraction(x) -> Fraction:
    """Exact rational for a parameter given as float/str/Fraction.

    Floats go through their shortest decimal repr, so 0.2 means 1/5.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def exact_log2(n: int):
    """log2(n) as an int when n is a power of two, else an exact rational of
    the float value.  Keeps budget formulas deterministic."""
    if n >= 1 and n & (n - 1) == 0:
        return n.bit_length() - 1
    return Fraction(math.log2(n))


def ceil_frac(x) -> int:
    f = Fraction(x)
    return -((-f.numerator) // f.denominator)


@dataclass(frozen=True)
class Domain:
    """A line [n] or hypergrid [n]^d; points are tuples (x_1, ..., x_d)."""

    n: int
    d: int = 1

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("domain needs n >= 1 and d >= 1")
        if self.n ** self.d > 2 ** 62:
            raise SizeLimit("domain too large to index")

    @classmethod
    def line(cls, n: int) -> "Domain":
        return cls(n, 1)

    @classmethod
    def grid(cls, n: int, d: int) -> "Domain":
        return cls(n, d)

    @classmethod
    def hamming_cube(cls, d: int) -> "Domain":
        return cls(2, d)

    @property
    def size(self) -> int:
        return self.n ** self.d

    @property
    def is_line(self) -> bool:
        return self.d == 1

    def contains(self, pt) -> bool:
        return len(pt) == self.d and all(1 <= c <= self.n for c in pt)

    def index_of(self, pt) -> int:
        """Canonical index in [0, size); coordinate 1 varies fastest."""
        if not self.contains(pt):
            raise ValueError(f"point {pt!r} outside {self}")
        idx = 0
        for c in reversed(pt):
            idx = idx * self.n + (c - 1)
        return idx

    def point_at(self, idx: int) -> tuple:
        if not 0 <= idx < self.size:
            raise ValueError(f"index {idx} outside domain of size {self.size}")
        coords = []
        for _ in range(self.d):
            idx, r = divmod(idx, self.n)
            coords.append(r + 1)
        return tuple(coords)

    def points(self) -> Iterator[tuple]:
        for idx in range(self.size):
            yield self.point_at(idx)

    def comparable_le(self, x, y) -> bool:
        """Coordinatewise partial order x <= y."""
        return all(a <= b for a, b in zip(x, y))


def _check_kind(kind: str, value, modulus) -> bool:
    if kind == "real":
        return isinstance(value, (int, float, Fraction)) and not isinstance(value, bool)
    if kind == "bit":
        return isinstance(value, int) and not isinstance(value, bool) and value in (0, 1)
    if kind == "field":
        return isinstance(value, int) and not isinstance(value, bool) and 0 <= value < modulus
    raise ValueError(f"unknown value kind {kind!r}")


class ErasedFunction:
    """A function on a domain where some points carry ERASED instead of a value.

    ``declared_alpha`` is the erasure bound the instance promises; testers
    trust it, the harness validates it against ``erased_fraction``.  All
    nonerased values must share one kind; mixing is rejected here, at
    construction.
    """

    __slots__ = ("domain", "values", "kind", "modulus", "declared_alpha", "_nonerased")

    def __init__(self, domain: Domain, values, kind: str = "real",
                 declared_alpha=None, modulus: Optional[int] = None):
        if kind not in VALUE_KINDS:
            raise ValueError(f"unknown value kind {kind!r}")
        if kind == "field":
            if modulus is None:
                raise ValueError("field functions need a modulus")
        elif modulus is not None:
            raise ValueError("modulus only applies to field functions")
        values = list(values)
        if len(values) != domain.size:
            raise ValueError(f"expected {domain.size} values, got {len(values)}")
        erased = 0
        for v in values:
            if v is ERASED:
                erased += 1
            elif not _check_kind(kind, v, modulus):
                raise ValueError(f"value {v!r} does not fit kind {kind!r}")
        if erased == len(values):
            raise ValueError("function has no nonerased points")
        exact = Fraction(erased, len(values))
        if declared_alpha is None:
            declared_alpha = exact
        else:
            declared_alpha = exact_fraction(declared_alpha)
            if not 0 <= declared_alpha < 1:
                raise ValueError("declared_alpha must lie in [0, 1)")
            if exact > declared_alpha:
                raise ValueError(
                    f"erased fraction {exact} exceeds declared_alpha {declared_alpha}")
        self.domain = domain
        self.values = values
        self.kind = kind
        self.modulus = modulus
        self.declared_alpha = declared_alpha
        self._nonerased = None

    def value_at(self, pt):
        """Direct read for generators, oracles and certificate checks.
        Tester code paths must go through QueryOracle instead."""
        return self.values[self.domain.index_of(pt)]

    def erased_count(self) -> int:
        return sum(1 for v in self.values if v is ERASED)

    def nonerased_indices(self):
        if self._nonerased is None:
            self._nonerased = [i for i, v in enumerate(self.values) if v is not ERASED]
        return self._nonerased

    def nonerased_points(self):
        return [self.domain.point_at(i) for i in self.nonerased_indices()]

    def __repr__(self):
        return (f"ErasedFunction(n={self.domain.n}, d={self.domain.d}, "
                f"kind={self.kind}, erased={self.erased_count()}/{self.domain.size})")


def erased_fraction(fn: ErasedFunction) -> Fraction:
    return Fraction(fn.erased_count(), fn.domain.size)


class QueryOracle:
    """The only read channel testers may use.  Counts every query; raises
    BudgetExhausted when count would pass the budget."""

    __slots__ = ("fn", "budget", "count")

    def __init__(self, fn: ErasedFunction, budget: Optional[int] = None):
        if budget is not None and budget < 0:
            raise ValueError("budget must be nonnegative")
        self.fn = fn
        self.budget = budget
        self.count = 0

    def set_budget(self, budget: int):
        if budget < 0:
            raise ValueError("budget must be nonnegative")
        self.budget = budget

    def query(self, pt):
        if self.budget is None:
            raise RuntimeError("query before any budget was set")
        if self.count >= self.budget:
            raise BudgetExhausted(self.count)
        self.count += 1
        return self.fn.values[self.fn.domain.index_of(pt)]

    @property
    def remaining(self) -> int:
        if self.budget is None:
            return 0
        return self.budget - self.count


@dataclass(frozen=True)
class Box:
    """Axis-aligned sub-box given by inclusive corner tuples."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty or malformed box {self.lo}..{self.hi}")

    @classmethod
    def whole(cls, domain: Domain) -> "Box":
        return cls((1,) * domain.d, (domain.n,) * domain.d)

    @property
    def size(self) -> int:
        s = 1
        for a, b in zip(self.lo, self.hi):
            s *= b - a + 1
        return s

    def sample(self, rng) -> tuple:
        # rng.randint is exactly uniform (rejection sampling underneath)
        return tuple(rng.randint(a, b) for a, b in zip(self.lo, self.hi))


def sample_nonerased_uniform(oracle: QueryOracle, box: Box, rng):
    """Uniform draws from the box until a nonerased point comes up.

    Returns (point, value).  Every draw costs one query, so a region with few
    nonerased points is paid for in budget; a fully erased region terminates
    only through BudgetExhausted.
    """
    while True:
        pt = box.sample(rng)
        v = oracle.query(pt)
        if v is not ERASED:
            return pt, v


def restrict_to_line(fn: ErasedFunction, axis: int, fixed: tuple) -> ErasedFunction:
    """Restriction to the axis-parallel line along ``axis`` (1-based) with the
    other coordinates fixed (in increasing dimension order)."""
    d, n = fn.domain.d, fn.domain.n
    if not 1 <= axis <= d:
        raise ValueError(f"axis {axis} outside 1..{d}")
    if len(fixed) != d - 1 or any(not 1 <= c <= n for c in fixed):
        raise ValueError("fixed coordinates do not match the domain")
    values = []
    for pos in range(1, n + 1):
        pt = fixed[:axis - 1] + (pos,) + fixed[axis - 1:]
        values.append(fn.value_at(pt))
    line = Domain.line(n)
    return ErasedFunction(line, values, kind=fn.kind, modulus=fn.modulus)


ACCEPT = "accept"
REJECT = "reject"

BUDGET_EXHAUSTED = "budget_exhausted"
VIOLATION_FOUND = "violation_found"
ALL_CHECKS_PASSED = "all_checks_passed"
ERASED_SAMPLE_ACCEPT = "erased_sample_accept"

_ACCEPT_REASONS = (BUDGET_EXHAUSTED, ALL_CHECKS_PASSED, ERASED_SAMPLE_ACCEPT)


@dataclass(frozen=True)
class Verdict:
    """Tester output.  Reject always carries a machine-checkable certificate;
    budget exhaustion is always an accept."""

    outcome: str
    reason: str
    queries_used: int
    certificate: object = None
    stats: Optional[dict] = None

    def __post_init__(self):
        if self.outcome == REJECT:
            if self.reason != VIOLATION_FOUND:
                raise ValueError("reject must be reasoned violation_found")
            if self.certificate is None:
                raise ValueError("reject needs a certificate")
        elif self.outcome == ACCEPT:
            if self.reason not in _ACCEPT_REASONS:
                raise ValueError(f"bad accept reason {self.reason!r}")
        else:
            raise ValueError(f"bad outcome {self.outcome!r}")

    @classmethod
    def accepted(cls, reason: str, queries: int, stats=None) -> "Verdict":
        return cls(ACCEPT, reason, queries, None, stats)

    @classmethod
    def rejected(cls, certificate, queries: int, stats=None) -> "Verdict":
        return cls(REJECT, VIOLATION_FOUND, queries, certificate, stats)

    @property
    def is_reject(self) -> bool:
        return self.outcome == REJECT
