"""Flat-file formats: functions, step bounds, posets, and certificates.

Function files are line-oriented text: a `domain` header, then one token
per point in canonical index order, `_` for an erased value.  Real tokens
load as exact rationals so downstream slope comparisons stay exact; they
accept plain decimals, fractions like 7/3, and scientific notation.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .core import ERASED, Domain, ErasedFunction
from .line import INF, LineBoundingPair
from .hypergrid import BoundingFamily
from .oracles import DistanceReport
from .transforms import Poset


def _tokens(path: str):
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            yield from line.split()


def _parse_value(token: str, kind: str):
    if token == "_":
        return ERASED
    if kind == "real":
        return Fraction(token)
    return int(token)


def load_function(path: str, kind: str = "real", modulus=None) -> ErasedFunction:
    toks = _tokens(path)
    head = next(toks, None)
    if head != "domain":
        raise ValueError(f"{path}: expected `domain` header, got {head!r}")
    shape = next(toks)
    if shape == "line":
        domain = Domain.line(int(next(toks)))
    elif shape == "grid":
        domain = Domain.grid(int(next(toks)), int(next(toks)))
    else:
        raise ValueError(f"{path}: unknown domain shape {shape!r}")
    values = [_parse_value(t, kind) for t in toks]
    if len(values) != domain.size:
        raise ValueError(
            f"{path}: {domain.size} points expected, {len(values)} tokens found")
    return ErasedFunction(domain, values, kind=kind, modulus=modulus)


def _format_value(v) -> str:
    if v is ERASED:
        return "_"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def save_function(fn: ErasedFunction, path: str) -> None:
    dom = fn.domain
    header = (f"domain line {dom.n}" if dom.is_line
              else f"domain grid {dom.n} {dom.d}")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        row = dom.n
        for start in range(0, dom.size, row):
            fh.write(" ".join(_format_value(v)
                              for v in fn.values[start:start + row]) + "\n")


def _parse_bound(token: str):
    if token == "inf":
        return INF
    if token == "-inf":
        return -INF
    return Fraction(token)


def load_bounds(path: str):
    """LineBoundingPair for d=1, BoundingFamily otherwise.  Per dimension:
    a row of lower bounds, then a row of upper bounds, n-1 tokens each."""
    toks = _tokens(path)
    head = next(toks, None)
    if head != "bounds":
        raise ValueError(f"{path}: expected `bounds` header, got {head!r}")
    d = int(next(toks))
    n = int(next(toks))
    pairs = []
    for _ in range(d):
        lower = [_parse_bound(next(toks)) for _ in range(n - 1)]
        upper = [_parse_bound(next(toks)) for _ in range(n - 1)]
        pairs.append(LineBoundingPair(lower, upper))
    if next(toks, None) is not None:
        raise ValueError(f"{path}: trailing tokens after {d} bound pairs")
    if d == 1:
        return pairs[0]
    return BoundingFamily(tuple(pairs))


def _format_bound(v) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def save_bounds(obj, path: str) -> None:
    pairs = obj.per_dim if isinstance(obj, BoundingFamily) else (obj,)
    n = pairs[0].n
    with open(path, "w") as fh:
        fh.write(f"bounds {len(pairs)} {n}\n")
        for pair in pairs:
            fh.write(" ".join(_format_bound(v) for v in pair.lower) + "\n")
            fh.write(" ".join(_format_bound(v) for v in pair.upper) + "\n")


def load_poset(path: str) -> Poset:
    toks = _tokens(path)
    head = next(toks, None)
    if head != "poset":
        raise ValueError(f"{path}: expected `poset` header, got {head!r}")
    size = int(next(toks))
    edges = []
    while True:
        u = next(toks, None)
        if u is None:
            break
        edges.append((int(u), int(next(toks))))
    return Poset(size, edges)


def save_poset(size: int, edges, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"poset {size}\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")


# ---------------------------------------------------------------------------
# distance reports as JSON

def report_to_dict(report: DistanceReport) -> dict:
    cert = report.certificate
    payload = {
        "property": report.property,
        "absolute": report.absolute,
        "relative": str(report.relative),
        "is_lower_bound": report.is_lower_bound,
        "certificate_kind": cert[0],
    }
    if cert[0] == "kept":
        payload["kept"] = [list(pt) for pt in cert[1:]]
    else:
        payload["pairs"] = [[list(a), list(b)] for a, b in cert[1:]]
    if report.matching_bound is not None:
        payload["matching_bound"] = report.matching_bound
    return payload


def report_json_line(report: DistanceReport) -> str:
    return json.dumps(report_to_dict(report), separators=(",", ":"))
