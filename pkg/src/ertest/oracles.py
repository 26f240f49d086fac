"""Exact distance oracles and certificate verification.

Distance here is the least number of nonerased points whose values must change
so that the restriction extends to a member of the property.  Every report
carries an optimal kept-set; the complement is exactly the set of points an
explicit completion changes, and ``verify_report`` re-checks that completion
for membership.  Oracles compare values exactly: feed ints or Fractions when
a certified distance matters.
"""
from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .core import (
    ERASED,
    Domain,
    ErasedFunction,
    InvalidField,
    SizeLimit,
)
from .line import INF, LineBoundingPair, pair_violates

GRID_EXACT_GATE = 20
FIELD_EXHAUSTIVE_GATE = 64
_ENUM_CAP = 1 << 20


@dataclass(frozen=True)
class DistanceReport:
    """Exact distance (or a certified lower bound) with its certificate.

    ``certificate`` is ("kept", points...) for exact reports, where points is
    a tuple of domain points left unchanged, or ("matching", pairs...) for a
    matching-based lower bound.  ``matching_bound`` accompanies grid reports.
    """

    property: str
    absolute: int
    relative: Fraction
    certificate: tuple
    is_lower_bound: bool = False
    matching_bound: Optional[int] = None


def line_pairs(fn: ErasedFunction):
    """Nonerased (position, value) pairs of a line function, in order."""
    if not fn.domain.is_line:
        raise ValueError("expected a line domain")
    return [(i + 1, v) for i, v in enumerate(fn.values) if v is not ERASED]


def _kept_cert(positions) -> tuple:
    return ("kept",) + tuple((p,) if isinstance(p, int) else p for p in positions)


# ---------------------------------------------------------------------------
# monotonicity on the line: |N| minus the longest nondecreasing subsequence


def longest_nondecreasing_indices(values) -> list:
    """Indices of one longest nondecreasing subsequence, O(m log m)."""
    tails = []      # tails[j] = smallest possible last value of a chain of length j+1
    tail_idx = []
    prev = [None] * len(values)
    for i, v in enumerate(values):
        j = bisect_right(tails, v)
        if j == len(tails):
            tails.append(v)
            tail_idx.append(i)
        else:
            tails[j] = v
            tail_idx[j] = i
        prev[i] = tail_idx[j - 1] if j > 0 else None
    out = []
    cur = tail_idx[-1] if tail_idx else None
    while cur is not None:
        out.append(cur)
        cur = prev[cur]
    return out[::-1]


def distance_to_monotone_line(fn: ErasedFunction) -> DistanceReport:
    pairs = line_pairs(fn)
    keep = longest_nondecreasing_indices([v for _, v in pairs])
    kept_pos = [pairs[i][0] for i in keep]
    absolute = len(pairs) - len(keep)
    return DistanceReport("monotone-line", absolute,
                          Fraction(absolute, len(pairs)), _kept_cert(kept_pos))


# ---------------------------------------------------------------------------
# bounded-derivative properties on the line


def distance_to_bdp_line(fn: ErasedFunction, bounds: LineBoundingPair) -> DistanceReport:
    """Longest subsequence whose consecutive pairs satisfy both directed
    bounds; consecutive pairs suffice because the directed sums telescope:
    if every step of a chain fits inside its segment sums, any two chain
    points differ by at most the concatenated sums."""
    pairs = line_pairs(fn)
    if bounds.n != fn.domain.n:
        raise ValueError("bounds length does not match the domain")
    m = len(pairs)
    best_len = [1] * m
    parent = [None] * m
    for i in range(m):
        pi, vi = pairs[i]
        for j in range(i):
            pj, vj = pairs[j]
            if best_len[j] + 1 > best_len[i] and not pair_violates(bounds, pj, vj, pi, vi):
                best_len[i] = best_len[j] + 1
                parent[i] = j
    if m == 0:
        raise ValueError("no nonerased points")
    end = max(range(m), key=lambda i: best_len[i])
    keep = []
    cur = end
    while cur is not None:
        keep.append(cur)
        cur = parent[cur]
    keep.reverse()
    absolute = m - len(keep)
    kept_pos = [pairs[i][0] for i in keep]
    return DistanceReport("bdp-line", absolute, Fraction(absolute, m), _kept_cert(kept_pos))


# ---------------------------------------------------------------------------
# convexity on the line


def _slope(p, q):
    (a, fa), (b, fb) = p, q
    num = fb - fa
    if isinstance(num, (int, Fraction)):
        return Fraction(num, b - a)
    return num / (b - a)


def distance_to_convex_line(fn: ErasedFunction) -> DistanceReport:
    """DP over (previous kept point, current kept point): a kept-set is
    convex-compatible iff its consecutive slopes never decrease."""
    pairs = line_pairs(fn)
    m = len(pairs)
    # best[(j, i)] = longest chain ending with consecutive points j then i
    best = {}
    parent = {}
    for i in range(m):
        for j in range(i):
            s_ji = _slope(pairs[j], pairs[i])
            length, par = 2, None
            for h in range(j):
                cand = best[(h, j)]
                if cand + 1 > length and _slope(pairs[h], pairs[j]) <= s_ji:
                    length, par = cand + 1, h
            best[(j, i)] = length
            parent[(j, i)] = par
    if best:
        (bj, bi) = max(best, key=lambda k: best[k])
        keep = [bi, bj]
        while parent[(bj, bi)] is not None:
            h = parent[(bj, bi)]
            keep.append(h)
            bj, bi = h, bj
        keep.reverse()
    else:
        keep = [0] if m else []
    absolute = m - len(keep)
    kept_pos = [pairs[i][0] for i in keep]
    return DistanceReport("convex-line", absolute, Fraction(absolute, m), _kept_cert(kept_pos))


# ---------------------------------------------------------------------------
# monotonicity over grids and posets

def _violated_order_edges(items, le):
    """Directed edges (i, j) with item i below item j but value above it.
    The relation is transitive, so its comparability graph is perfect and
    the maximum violation-free subset is a maximum antichain."""
    edges = []
    for i, (p, v) in enumerate(items):
        for j, (q, w) in enumerate(items):
            if i != j and le(p, q) and p != q and v > w:
                edges.append((i, j))
    return edges


def _max_bipartite_matching(m: int, edges) -> dict:
    """Kuhn's augmenting paths; returns {left: right} over node ids 0..m-1."""
    adj = [[] for _ in range(m)]
    for a, b in edges:
        adj[a].append(b)
    match_right = {}

    def try_augment(a, seen):
        for b in adj[a]:
            if b in seen:
                continue
            seen.add(b)
            if b not in match_right or try_augment(match_right[b], seen):
                match_right[b] = a
                return True
        return False

    for a in range(m):
        try_augment(a, set())
    return {a: b for b, a in match_right.items()}


def _min_changes_poset(items, le):
    """Exact distance to monotonicity over any finite poset, with an optimal
    kept-set.  The violated-pair relation is a strict partial order; a largest
    antichain of it (via matching and the alternating-reachability cover) is
    the largest violation-free subset."""
    m = len(items)
    edges = _violated_order_edges(items, le)
    match_lr = _max_bipartite_matching(m, edges)
    match_rl = {b: a for a, b in match_lr.items()}
    adj = [[] for _ in range(m)]
    for a, b in edges:
        adj[a].append(b)
    # alternating reachability from unmatched left nodes
    reach_left = set(a for a in range(m) if a not in match_lr)
    reach_right = set()
    frontier = list(reach_left)
    while frontier:
        nxt = []
        for a in frontier:
            for b in adj[a]:
                if b not in reach_right and match_lr.get(a) != b:
                    reach_right.add(b)
                    a2 = match_rl.get(b)
                    if a2 is not None and a2 not in reach_left:
                        reach_left.add(a2)
                        nxt.append(a2)
        frontier = nxt
    # vertex cover: left nodes not reached, right nodes reached
    kept = [i for i in range(m)
            if i in reach_left and i not in reach_right]
    assert len(kept) == m - len(match_lr)
    kept_set = set(kept)
    for a, b in edges:
        assert not (a in kept_set and b in kept_set), "antichain recovery failed"
    return len(match_lr), kept


def grid_le(x, y) -> bool:
    return all(a <= b for a, b in zip(x, y))


def _grid_items(fn: ErasedFunction):
    return [(fn.domain.point_at(i), fn.values[i]) for i in fn.nonerased_indices()]


def distance_to_monotone_grid_exact(fn: ErasedFunction) -> DistanceReport:
    """Exact grid distance at any size via the matching route.  The spec-sized
    branch-and-bound oracle cross-checks this on small instances."""
    items = _grid_items(fn)
    absolute, keep = _min_changes_poset(items, grid_le)
    kept_pts = [items[i][0] for i in keep]
    return DistanceReport("monotone-grid", absolute,
                          Fraction(absolute, len(items)), _kept_cert(kept_pts))


def greedy_maximal_matching(num_nodes: int, edges) -> list:
    """Deterministic greedy maximal matching over an undirected edge list."""
    used = set()
    picked = []
    for a, b in edges:
        if a not in used and b not in used:
            picked.append((a, b))
            used.add(a)
            used.add(b)
    return picked


def _min_vertex_cover_bnb(num_nodes: int, edges) -> list:
    """Exact minimum vertex cover by branching on an uncovered edge, with a
    greedy-matching lower bound for pruning."""
    best = {"size": num_nodes, "cover": frozenset(range(num_nodes))}

    def matching_lb(cover):
        used = set()
        count = 0
        for a, b in edges:
            if a in cover or b in cover or a in used or b in used:
                continue
            used.add(a)
            used.add(b)
            count += 1
        return count

    def rec(cover, size):
        if size + matching_lb(cover) >= best["size"]:
            return
        for a, b in edges:
            if a not in cover and b not in cover:
                rec(cover | {a}, size + 1)
                rec(cover | {b}, size + 1)
                return
        best["size"] = size
        best["cover"] = frozenset(cover)

    rec(set(), 0)
    return sorted(best["cover"])


def distance_to_monotone_grid_small(fn: ErasedFunction) -> DistanceReport:
    items = _grid_items(fn)
    m = len(items)
    if m > GRID_EXACT_GATE:
        raise SizeLimit(f"{m} nonerased points exceeds the exact gate {GRID_EXACT_GATE}")
    edges = _violated_order_edges(items, grid_le)
    undirected = sorted(set((min(a, b), max(a, b)) for a, b in edges))
    matching = greedy_maximal_matching(m, undirected)
    cover = _min_vertex_cover_bnb(m, undirected)
    absolute = len(cover)
    assert len(matching) <= absolute <= 2 * len(matching) if matching else absolute == 0
    kept = [i for i in range(m) if i not in set(cover)]
    kept_pts = [items[i][0] for i in kept]
    return DistanceReport("monotone-grid", absolute, Fraction(absolute, m),
                          _kept_cert(kept_pts), matching_bound=len(matching))


def monotone_grid_matching_bound(fn: ErasedFunction) -> DistanceReport:
    """Certified lower bound for grids of any size: each matched violated
    pair forces at least one change."""
    items = _grid_items(fn)
    edges = _violated_order_edges(items, grid_le)
    undirected = sorted(set((min(a, b), max(a, b)) for a, b in edges))
    matching = greedy_maximal_matching(len(items), undirected)
    cert = ("matching",) + tuple((items[a][0], items[b][0]) for a, b in matching)
    return DistanceReport("monotone-grid", len(matching),
                          Fraction(len(matching), len(items)), cert,
                          is_lower_bound=True, matching_bound=len(matching))


def bdp_grid_matching_bound(fn: ErasedFunction, family) -> DistanceReport:
    """Matching lower bound on the grid distance to a bounded-derivative
    property; ``family`` supplies pair_violates over grid points."""
    items = _grid_items(fn)
    edges = []
    for i, (p, v) in enumerate(items):
        for j in range(i + 1, len(items)):
            q, w = items[j]
            if family.pair_violates(p, v, q, w):
                edges.append((i, j))
    matching = greedy_maximal_matching(len(items), edges)
    cert = ("matching",) + tuple((items[a][0], items[b][0]) for a, b in matching)
    return DistanceReport("bdp-grid", len(matching),
                          Fraction(len(matching), len(items)), cert,
                          is_lower_bound=True, matching_bound=len(matching))


# ---------------------------------------------------------------------------
# runs of a Boolean function

def count_alternations(bits) -> int:
    bits = list(bits)
    return sum(1 for a, b in zip(bits, bits[1:]) if a != b)


def distance_to_k_runs(fn: ErasedFunction, k: int) -> DistanceReport:
    """Min changes so the nonerased values form at most k runs, i.e. at most
    k-1 alternations.  DP over (points assigned, runs used, last bit)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if fn.kind != "bit":
        raise ValueError("runs are defined for bit-valued functions")
    pairs = line_pairs(fn)
    m = len(pairs)
    NEG = m + 1
    # cost[r][b], runs r in 1..k capped, last bit b
    cost = [[NEG] * 2 for _ in range(k + 1)]
    back = []
    first = pairs[0][1]
    for b in (0, 1):
        cost[1][b] = 0 if b == first else 1
    back.append(None)
    for i in range(1, m):
        v = pairs[i][1]
        nxt = [[NEG] * 2 for _ in range(k + 1)]
        choice = [[None] * 2 for _ in range(k + 1)]
        for r in range(1, k + 1):
            for b in (0, 1):
                if cost[r][b] > m:
                    continue
                for c in (0, 1):
                    r2 = r + (1 if c != b else 0)
                    if r2 > k:
                        continue
                    w = cost[r][b] + (0 if c == v else 1)
                    if w < nxt[r2][c]:
                        nxt[r2][c] = w
                        choice[r2][c] = (r, b)
        cost = nxt
        back.append(choice)
    ends = [(cost[r][b], r, b) for r in range(1, k + 1) for b in (0, 1) if cost[r][b] <= m]
    absolute, r, b = min(ends)
    labels = [None] * m
    for i in range(m - 1, 0, -1):
        labels[i] = b
        r, b = back[i][r][b]
    labels[0] = b
    kept_pos = [pairs[i][0] for i in range(m) if labels[i] == pairs[i][1]]
    report = DistanceReport("k-runs", absolute, Fraction(absolute, m), _kept_cert(kept_pos))
    assert count_alternations(labels) <= k - 1
    assert m - len(kept_pos) == absolute
    return report


# ---------------------------------------------------------------------------
# low-degree polynomials over a prime field

def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def poly_eval(coeffs, x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def interpolate(points, p: int) -> list:
    """Lagrange interpolation through distinct (x, y) pairs over GF(p);
    returns coefficients, low order first, length len(points)."""
    coeffs = [0] * len(points)
    for i, (xi, yi) in enumerate(points):
        basis = [1]
        denom = 1
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            new = [0] * (len(basis) + 1)
            for t, c in enumerate(basis):
                new[t] = (new[t] - c * xj) % p
                new[t + 1] = (new[t + 1] + c) % p
            basis = new
            denom = (denom * (xi - xj)) % p
        scale = (yi * pow(denom, p - 2, p)) % p
        for t, c in enumerate(basis):
            coeffs[t] = (coeffs[t] + c * scale) % p
    return coeffs


def distance_to_low_degree(fn: ErasedFunction, degree: int) -> DistanceReport:
    """p minus the best agreement over every coefficient vector (erased points
    reduce both sides: distance and |N| count only nonerased points)."""
    if fn.kind != "field":
        raise ValueError("low-degree distance needs a field-valued function")
    p = fn.modulus
    if not is_prime(p):
        raise InvalidField(f"{p} is not prime")
    if p > FIELD_EXHAUSTIVE_GATE or p ** (degree + 1) > _ENUM_CAP:
        raise SizeLimit("beyond the exhaustive coefficient regime")
    if degree + 1 > p:
        raise ValueError("degree too high for the field size")
    pts = [(i, v) for i, v in enumerate(fn.values) if v is not ERASED]
    best_agree, best_coeffs = -1, None
    for coeffs in itertools.product(range(p), repeat=degree + 1):
        agree = sum(1 for x, y in pts if poly_eval(coeffs, x, p) == y)
        if agree > best_agree:
            best_agree, best_coeffs = agree, coeffs
    m = len(pts)
    absolute = m - best_agree
    kept = [(x + 1,) for x, y in pts if poly_eval(best_coeffs, x, p) == y]
    return DistanceReport("low-degree", absolute, Fraction(absolute, m),
                          ("kept",) + tuple(kept))


# ---------------------------------------------------------------------------
# restorability and report verification

@dataclass(frozen=True)
class PropertySpec:
    """Descriptor naming a property and its parameters."""

    tag: str
    bounds: Optional[LineBoundingPair] = None
    k: Optional[int] = None
    degree: Optional[int] = None


def compute_distance(fn: ErasedFunction, prop: PropertySpec) -> DistanceReport:
    if prop.tag == "monotone-line":
        return distance_to_monotone_line(fn)
    if prop.tag == "bdp-line":
        return distance_to_bdp_line(fn, prop.bounds)
    if prop.tag == "convex-line":
        return distance_to_convex_line(fn)
    if prop.tag == "monotone-grid":
        return distance_to_monotone_grid_small(fn)
    if prop.tag == "k-runs":
        return distance_to_k_runs(fn, prop.k)
    if prop.tag == "low-degree":
        return distance_to_low_degree(fn, prop.degree)
    raise ValueError(f"unknown property {prop.tag!r}")


def is_restorable(fn: ErasedFunction, prop: PropertySpec) -> bool:
    """Extendable properties reduce restorability to the restriction:
    distance of f on its nonerased points is zero."""
    return compute_distance(fn, prop).absolute == 0


# -- canonical completions, one per property ---------------------------------

def _ext_add(a, b):
    if a in (INF, -INF) or b in (INF, -INF):
        s = (a if a in (INF, -INF) else 0) + (b if b in (INF, -INF) else 0)
        return s
    return a + b


def complete_bdp_line(pairs, kept_pos, bounds: LineBoundingPair) -> dict:
    """Assign values to the dropped points so every consecutive nonerased pair
    fits its directed segment sums; keeps the kept points untouched.  Greedy
    left-to-right inside the corridor spanned by the previous point and the
    next kept point."""
    kept = set(kept_pos)
    kept_list = [p for p, _ in pairs if p in kept]
    vals = dict(pairs)
    out = {}
    prev = None
    next_kept_iter = iter(kept_list)
    next_kept = next(next_kept_iter, None)
    for pos, _ in pairs:
        if next_kept is not None and pos > next_kept:
            next_kept = next(next_kept_iter, None)
        if pos in kept:
            out[pos] = vals[pos]
            prev = pos
            continue
        lowers, uppers = [], []
        if prev is not None:
            lowers.append(_ext_add(out[prev], bounds.seg_lower(prev, pos)))
            uppers.append(_ext_add(out[prev], bounds.seg_upper(prev, pos)))
        if next_kept is not None:
            lowers.append(_ext_add(vals[next_kept], -bounds.seg_upper(pos, next_kept)))
            uppers.append(_ext_add(vals[next_kept], -bounds.seg_lower(pos, next_kept)))
        lo = max(lowers) if lowers else -INF
        hi = min(uppers) if uppers else INF
        if lo not in (INF, -INF):
            out[pos] = lo
        elif hi not in (INF, -INF):
            out[pos] = hi
        else:
            out[pos] = 0
        prev = pos
    return out


def complete_monotone_line(pairs, kept_pos, n: int) -> dict:
    return complete_bdp_line(pairs, kept_pos, LineBoundingPair.monotone(n))


def complete_convex_line(pairs, kept_pos) -> dict:
    """Piecewise-linear through the kept points, extended with the terminal
    slopes beyond them; a single kept point spreads as a constant."""
    vals = dict(pairs)
    kept = sorted(kept_pos)
    out = {}
    for pos, _ in pairs:
        if pos in vals and pos in set(kept):
            out[pos] = vals[pos]
    if len(kept) == 1:
        for pos, _ in pairs:
            out[pos] = vals[kept[0]]
        return out
    slopes = [_slope((kept[i], vals[kept[i]]), (kept[i + 1], vals[kept[i + 1]]))
              for i in range(len(kept) - 1)]
    for pos, _ in pairs:
        if pos in out:
            continue
        if pos < kept[0]:
            out[pos] = vals[kept[0]] + slopes[0] * (pos - kept[0])
        elif pos > kept[-1]:
            out[pos] = vals[kept[-1]] + slopes[-1] * (pos - kept[-1])
        else:
            i = bisect_right(kept, pos) - 1
            a = kept[i]
            out[pos] = vals[a] + slopes[i] * (pos - a)
    return out


def is_member_bdp_values(points_values, bounds: LineBoundingPair) -> bool:
    items = sorted(points_values.items())
    for (a, fa), (b, fb) in itertools.combinations(items, 2):
        if pair_violates(bounds, a, fa, b, fb):
            return False
    return True


def is_member_convex_values(points_values) -> bool:
    items = sorted(points_values.items())
    last = None
    for (a, fa), (b, fb) in zip(items, items[1:]):
        s = _slope((a, fa), (b, fb))
        if last is not None and s < last:
            return False
        last = s
    return True


def complete_monotone_grid(items, kept_idx) -> dict:
    """Monotone extension: each point takes the max kept value below it,
    defaulting to the overall minimum kept value."""
    kept = [items[i] for i in kept_idx]
    floor = min(v for _, v in kept)
    out = {}
    for p, _ in items:
        below = [v for q, v in kept if grid_le(q, p)]
        out[p] = max(below) if below else floor
    return out


def verify_report(fn: ErasedFunction, prop: PropertySpec, report: DistanceReport) -> bool:
    """Independent re-check: the completion that keeps exactly the certified
    kept-set is a member, and it changes exactly ``absolute`` points."""
    if report.is_lower_bound:
        return _verify_matching(fn, prop, report)
    kept_pts = report.certificate[1:]
    if prop.tag in ("monotone-line", "bdp-line", "convex-line", "k-runs", "low-degree"):
        pairs = line_pairs(fn)
        kept_pos = [p[0] for p in kept_pts]
        if prop.tag == "convex-line":
            filled = complete_convex_line(pairs, kept_pos)
            ok = is_member_convex_values(filled)
        elif prop.tag == "k-runs":
            # a completion exists iff the kept bits already fit inside k runs
            ok = _k_runs_completion_exists(pairs, set(kept_pos), prop.k)
            changed = len(pairs) - len(kept_pos)
            return ok and changed == report.absolute
        elif prop.tag == "low-degree":
            return _verify_low_degree(fn, prop, kept_pos, report)
        else:
            bounds = prop.bounds if prop.tag == "bdp-line" else LineBoundingPair.monotone(fn.domain.n)
            filled = complete_bdp_line(pairs, kept_pos, bounds)
            ok = is_member_bdp_values(filled, bounds)
        changed = sum(1 for pos, v in pairs if filled[pos] != v)
        return ok and changed == report.absolute == len(pairs) - len(kept_pos)
    if prop.tag == "monotone-grid":
        items = _grid_items(fn)
        index = {p: i for i, (p, _) in enumerate(items)}
        kept_idx = [index[p] for p in kept_pts]
        filled = complete_monotone_grid(items, kept_idx)
        for p, v in filled.items():
            for q, w in filled.items():
                if grid_le(p, q) and v > w:
                    return False
        changed = sum(1 for p, v in items if filled[p] != v)
        return changed == report.absolute
    raise ValueError(f"unknown property {prop.tag!r}")


def _k_runs_completion_exists(pairs, kept_pos, k) -> bool:
    # scan: the kept bits must themselves have at most k-1 alternations
    kept_bits = [v for p, v in pairs if p in kept_pos]
    return count_alternations(kept_bits) <= k - 1


def _verify_low_degree(fn, prop, kept_pos, report) -> bool:
    p = fn.modulus
    pts = [(i, v) for i, v in enumerate(fn.values) if v is not ERASED]
    kept = set(x - 1 for x in kept_pos)
    sample = [(x, y) for x, y in pts if x in kept][:prop.degree + 1]
    if not sample:
        return report.absolute == len(pts)
    coeffs = interpolate(sample, p)
    if len(coeffs) > prop.degree + 1 and any(c for c in coeffs[prop.degree + 1:]):
        return False
    agree = all(poly_eval(coeffs, x, p) == y for x, y in pts if x in kept)
    changed = sum(1 for x, y in pts if poly_eval(coeffs, x, p) != y)
    return agree and changed == report.absolute


def _verify_matching(fn: ErasedFunction, prop: PropertySpec, report: DistanceReport) -> bool:
    pairs = report.certificate[1:]
    seen = set()
    for a, b in pairs:
        if a in seen or b in seen:
            return False
        seen.add(a)
        seen.add(b)
        if prop.tag == "monotone-grid":
            lo, hi = (a, b) if grid_le(a, b) else (b, a)
            if not (grid_le(lo, hi) and fn.value_at(lo) > fn.value_at(hi)):
                return False
        else:
            return False
    return len(pairs) == report.absolute
