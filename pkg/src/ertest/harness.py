"""Seeded experiment runner and report writer.

Every trial's randomness comes from streams derived from (master seed,
purpose, trial index), so a config reproduces bit-for-bit regardless of
worker count.  Aggregation keeps only integer counts and sums; floats are
computed once at the end.  Two invariants are enforced on every single
trial, not sampled: queries never exceed the tester's budget formula, and
every reject certificate re-validates against the instance outside the
oracle.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Callable, Optional

from .core import (
    ConfigError,
    ErasedFunction,
    QueryOracle,
    Verdict,
    exact_fraction,
)
from .rng import make_rng
from .line import (
    bdp_line_budget,
    check_line_certificate,
    convex_line_budget,
    monotone_line_budget,
    test_bdp_line,
    test_convex_line,
    test_monotone_line,
)
from .hypergrid import (
    bdp_hypergrid_budget,
    check_grid_certificate,
    monotone_hypergrid_budget,
    test_bdp_hypergrid,
    test_monotone_hypergrid,
)
from .transforms import (
    check_extendable_certificate,
    check_k_runs_certificate,
    check_pot_certificate,
    erasure_resilient_extendable,
    erasure_resilient_pot_run,
    extendable_budget,
    k_runs_sample_size,
    low_degree_pot,
    poset_monotone_uniform_spec,
    test_k_runs,
)
from .adversary import InstanceSpec, classic_monotone_line

WORKERS_ENV = "ERTEST_WORKERS"
Z99 = 2.5758293035489004  # two-sided 99% normal quantile

CSV_COLUMNS = ("tester", "n", "d", "eps", "alpha", "trials", "seed",
               "accept_rate", "ci_low", "ci_high", "mean_q", "max_q",
               "budget_Q")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a tester, its parameters, an instance source, and a
    master seed.  ``instance`` is either a fixed ErasedFunction or an
    InstanceSpec realized afresh per trial."""

    tester: str
    instance: object
    trials: int
    seed: int
    eps: object = None
    alpha: object = None
    k: Optional[int] = None
    degree: Optional[int] = None
    bounds: object = None
    poset: object = None


@dataclass(frozen=True)
class TrialSummary:
    tester: str
    n: int
    d: int
    eps: str
    alpha: str
    trials: int
    seed: int
    rejections: int
    accept_rate: float
    ci_low: float
    ci_high: float
    ci_flagged: bool
    mean_q: float
    max_q: int
    stddev_q: float
    budget_Q: int
    mean_sampling: Optional[float]
    mean_walking: Optional[float]
    wall_time: float


def _cfg_alpha(cfg: ExperimentConfig, fn: ErasedFunction):
    return fn.declared_alpha if cfg.alpha is None else exact_fraction(cfg.alpha)


@dataclass(frozen=True)
class TesterEntry:
    run: Callable
    budget: Callable
    validate: Callable
    needs_eps: bool = True


TESTERS = {
    "monotone-line": TesterEntry(
        run=lambda cfg, o, rng: test_monotone_line(
            o, cfg.eps, _cfg_alpha(cfg, o.fn), rng),
        budget=lambda cfg, fn: monotone_line_budget(
            fn.domain.n, cfg.eps, _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_line_certificate(fn, cert),
    ),
    "classic-monotone-line": TesterEntry(
        run=lambda cfg, o, rng: classic_monotone_line(
            o, cfg.eps, _cfg_alpha(cfg, o.fn), rng),
        budget=lambda cfg, fn: monotone_line_budget(
            fn.domain.n, cfg.eps, _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_line_certificate(fn, cert),
    ),
    "bdp-line": TesterEntry(
        run=lambda cfg, o, rng: test_bdp_line(
            o, cfg.bounds, cfg.eps, _cfg_alpha(cfg, o.fn), rng),
        budget=lambda cfg, fn: bdp_line_budget(
            fn.domain.n, cfg.eps, _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_line_certificate(
            fn, cert, cfg.bounds),
    ),
    "convex-line": TesterEntry(
        run=lambda cfg, o, rng: test_convex_line(
            o, cfg.eps, _cfg_alpha(cfg, o.fn), rng),
        budget=lambda cfg, fn: convex_line_budget(
            fn.domain.n, cfg.eps, _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_line_certificate(fn, cert),
    ),
    "monotone-grid": TesterEntry(
        run=lambda cfg, o, rng: test_monotone_hypergrid(
            o, cfg.eps, _cfg_alpha(cfg, o.fn), rng),
        budget=lambda cfg, fn: monotone_hypergrid_budget(
            fn.domain.n, fn.domain.d, cfg.eps, _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_grid_certificate(fn, cert),
    ),
    "bdp-grid": TesterEntry(
        run=lambda cfg, o, rng: test_bdp_hypergrid(
            o, cfg.bounds, cfg.eps, _cfg_alpha(cfg, o.fn), rng),
        budget=lambda cfg, fn: bdp_hypergrid_budget(
            fn.domain.n, fn.domain.d, cfg.eps, _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_grid_certificate(
            fn, cert, cfg.bounds),
    ),
    "k-runs": TesterEntry(
        run=lambda cfg, o, rng: test_k_runs(o, cfg.k, cfg.eps, rng),
        budget=lambda cfg, fn: k_runs_sample_size(cfg.k, cfg.eps),
        validate=lambda cfg, fn, cert: check_k_runs_certificate(
            fn, cfg.k, cert),
    ),
    "low-degree": TesterEntry(
        run=lambda cfg, o, rng: erasure_resilient_pot_run(
            low_degree_pot(o.fn.modulus, cfg.degree), o, rng),
        budget=lambda cfg, fn: cfg.degree + 2,
        validate=lambda cfg, fn, cert: check_pot_certificate(
            fn, low_degree_pot(fn.modulus, cfg.degree), cert),
        needs_eps=False,
    ),
    "poset-monotone": TesterEntry(
        run=lambda cfg, o, rng: erasure_resilient_extendable(
            poset_monotone_uniform_spec(cfg.poset), _cfg_alpha(cfg, o.fn),
            cfg.eps, o, rng),
        budget=lambda cfg, fn: extendable_budget(
            poset_monotone_uniform_spec(cfg.poset), fn.domain.size, cfg.eps,
            _cfg_alpha(cfg, fn)),
        validate=lambda cfg, fn, cert: check_extendable_certificate(
            fn, poset_monotone_uniform_spec(cfg.poset), cert),
    ),
}

_LINE_TESTERS = ("monotone-line", "classic-monotone-line", "bdp-line",
                 "convex-line", "k-runs", "low-degree", "poset-monotone")


def validate_config(cfg: ExperimentConfig) -> TesterEntry:
    if cfg.trials < 1:
        raise ConfigError("trials must be at least 1")
    entry = TESTERS.get(cfg.tester)
    if entry is None:
        raise ConfigError(f"unknown tester {cfg.tester!r}; "
                          f"known: {sorted(TESTERS)}")
    if entry.needs_eps and cfg.eps is None:
        raise ConfigError(f"{cfg.tester} needs a proximity parameter")
    if cfg.tester in ("bdp-line", "bdp-grid") and cfg.bounds is None:
        raise ConfigError(f"{cfg.tester} needs bounds")
    if cfg.tester == "k-runs" and cfg.k is None:
        raise ConfigError("k-runs needs k")
    if cfg.tester == "low-degree" and cfg.degree is None:
        raise ConfigError("low-degree needs a degree")
    if cfg.tester == "poset-monotone" and cfg.poset is None:
        raise ConfigError("poset-monotone needs a poset")
    fn = _peek_instance(cfg)
    if cfg.tester in _LINE_TESTERS and not fn.domain.is_line:
        raise ConfigError(f"{cfg.tester} runs on line domains, "
                          f"got d={fn.domain.d}")
    if cfg.tester in ("monotone-grid", "bdp-grid") and fn.domain.is_line:
        raise ConfigError(f"{cfg.tester} expects d >= 2")
    if cfg.tester == "k-runs" and fn.kind != "bit":
        raise ConfigError("k-runs expects bit values")
    if cfg.tester == "low-degree" and fn.kind != "field":
        raise ConfigError("low-degree expects field values")
    return entry


def _peek_instance(cfg: ExperimentConfig) -> ErasedFunction:
    if isinstance(cfg.instance, ErasedFunction):
        return cfg.instance
    if isinstance(cfg.instance, InstanceSpec):
        fn, _ = cfg.instance.realize(make_rng(cfg.seed, "inst", 0))
        return fn
    raise ConfigError("instance must be an ErasedFunction or an InstanceSpec")


def _trial_fn(cfg: ExperimentConfig, index: int) -> ErasedFunction:
    if isinstance(cfg.instance, ErasedFunction):
        return cfg.instance
    fn, _ = cfg.instance.realize(make_rng(cfg.seed, "inst", index))
    return fn


def _run_chunk(cfg: ExperimentConfig, lo: int, hi: int) -> tuple:
    """Trials [lo, hi); returns commutative partial sums."""
    entry = TESTERS[cfg.tester]
    rejections = 0
    sum_q = 0
    sum_q2 = 0
    max_q = 0
    budget_q = 0
    sum_sampling = 0
    sum_walking = 0
    have_stats = 0
    for i in range(lo, hi):
        fn = _trial_fn(cfg, i)
        oracle = QueryOracle(fn)
        verdict = entry.run(cfg, oracle, make_rng(cfg.seed, "trial", i))
        cap = entry.budget(cfg, fn)
        if verdict.queries_used > cap:
            raise AssertionError(
                f"trial {i}: {verdict.queries_used} queries exceeded the "
                f"budget {cap} for {cfg.tester}")
        if verdict.is_reject and not entry.validate(cfg, fn, verdict.certificate):
            raise RuntimeError(
                f"trial {i}: reject certificate failed re-validation: "
                f"{verdict.certificate!r}")
        rejections += verdict.is_reject
        q = verdict.queries_used
        sum_q += q
        sum_q2 += q * q
        max_q = max(max_q, q)
        budget_q = max(budget_q, cap)
        if verdict.stats:
            have_stats += 1
            sum_sampling += verdict.stats.get("sampling", 0)
            sum_walking += verdict.stats.get("walking", 0)
    return (rejections, sum_q, sum_q2, max_q, budget_q,
            sum_sampling, sum_walking, have_stats)


def _merge(parts) -> tuple:
    out = [0] * 8
    for part in parts:
        for j, v in enumerate(part):
            out[j] = max(out[j], v) if j in (3, 4) else out[j] + v
    return tuple(out)


def run_experiment(cfg: ExperimentConfig) -> TrialSummary:
    validate_config(cfg)
    start = time.perf_counter()
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1 and cfg.trials > 1:
        chunk = -(-cfg.trials // workers)
        spans = [(i, min(i + chunk, cfg.trials))
                 for i in range(0, cfg.trials, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [cfg] * len(spans),
                                  [s[0] for s in spans], [s[1] for s in spans]))
        totals = _merge(parts)
    else:
        totals = _run_chunk(cfg, 0, cfg.trials)
    (rejections, sum_q, sum_q2, max_q, budget_q,
     sum_sampling, sum_walking, have_stats) = totals
    wall = time.perf_counter() - start

    t = cfg.trials
    accepts = t - rejections
    phat = accepts / t
    se = math.sqrt(phat * (1 - phat) / t)
    mean_q = sum_q / t
    var = sum_q2 / t - mean_q * mean_q
    fn0 = _peek_instance(cfg)
    return TrialSummary(
        tester=cfg.tester,
        n=fn0.domain.n,
        d=fn0.domain.d,
        eps="" if cfg.eps is None else str(exact_fraction(cfg.eps)),
        alpha=str(_cfg_alpha(cfg, fn0)),
        trials=t,
        seed=cfg.seed,
        rejections=rejections,
        accept_rate=phat,
        ci_low=max(0.0, phat - Z99 * se),
        ci_high=min(1.0, phat + Z99 * se),
        ci_flagged=t < 100,
        mean_q=mean_q,
        max_q=max_q,
        stddev_q=math.sqrt(max(0.0, var)),
        budget_Q=budget_q,
        mean_sampling=sum_sampling / have_stats if have_stats else None,
        mean_walking=sum_walking / have_stats if have_stats else None,
        wall_time=wall,
    )


# ---------------------------------------------------------------------------
# reports

def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_rows(summaries) -> list:
    rows = [",".join(CSV_COLUMNS)]
    for s in summaries:
        record = asdict(s)
        rows.append(",".join(_csv_cell(record[c]) for c in CSV_COLUMNS))
    return rows


def emit_report(summaries, fmt: str, path: str) -> None:
    """CSV carries the pinned column set (no wall time, so identical seeds
    give identical bytes); JSON carries full summaries and round-trips."""
    if isinstance(summaries, TrialSummary):
        summaries = [summaries]
    summaries = list(summaries)
    if not summaries:
        raise ConfigError("nothing to report")
    if fmt == "csv":
        text = "\n".join(summary_rows(summaries)) + "\n"
    elif fmt == "json":
        import json
        text = json.dumps([asdict(s) for s in summaries], indent=2) + "\n"
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)


def summaries_from_json(path: str) -> list:
    import json
    with open(path) as fh:
        data = json.load(fh)
    return [TrialSummary(**record) for record in data]
