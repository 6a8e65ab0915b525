"""
Verification campaigns and the single-function measure command.

A campaign enumerates truth tables (every table at a given arity, or a
seeded random sample) and evaluates the selected relations on each.  The
index range is cut into contiguous shards that run in a process pool;
results are reduced in shard order so reports do not depend on
scheduling.

Randomness is PCG64 throughout.  Function ``k`` of a campaign with seed
``s`` draws its table from ``SeedSequence(s, spawn_key=(k, 0))`` and a
relation's private stream ``j`` from ``SeedSequence(s, spawn_key=(k, j))``.
"""

import asyncio
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging
import time
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.config import settings
from ..core.errors import ArityCapError, BftkError, PreconditionError
from ..core.polynomial import degree, degree_gf2
from ..core.truth_table import TruthTable, load_function
from ..models.schemas import CampaignReport, MeasureRecord, RelationFailure, RelationSummary
from .approx import DEFAULT_EPSILON, approx_degree
from .combinatorial import (
    BS_MAX_ARITY,
    CERT_MAX_ARITY,
    DQ_MAX_ARITY,
    block_sensitivity,
    certificate_complexity,
    det_query_complexity,
    sensitivity,
)
from .relations import MeasureContext, Relation, resolve_relations
from .spectral import koutsoupias, spectral_sensitivity

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_ARITY = 4
# digits kept for floats in reports
REPORT_DIGITS = 10
SHARDS_PER_JOB = 4


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _rounded(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(float(value), REPORT_DIGITS)


def campaign_function(n: int, index: int, mode: str, seed: int) -> TruthTable:
    """The ``index``-th truth table of a campaign."""
    if mode == "exhaustive":
        values = (index >> np.arange(1 << n, dtype=np.int64)[::-1]) & 1
        return TruthTable.from_values(values.astype(np.uint8))
    return TruthTable.from_values(_stream(seed, index, 0).integers(0, 2, size=1 << n, dtype=np.uint8))


@dataclass
class RelationTally:
    checked: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    worst_margin: Optional[float] = None

    def add_margin(self, margin: Optional[float]) -> None:
        if margin is not None:
            self.worst_margin = margin if self.worst_margin is None else min(self.worst_margin, margin)

    def merge(self, other: "RelationTally") -> None:
        self.checked += other.checked
        self.passed += other.passed
        self.failed += other.failed
        self.skipped += other.skipped
        self.add_margin(other.worst_margin)


@dataclass
class ShardResult:
    start: int
    stop: int
    tallies: Dict[str, RelationTally] = field(default_factory=dict)
    failures: List[RelationFailure] = field(default_factory=list)


def check_function(
    f: TruthTable, relations: Sequence[Relation], seed: int, index: int, tolerance: Optional[float]
) -> List[tuple]:
    """Evaluate every relation on ``f``; returns (relation, outcome or error) pairs."""
    ctx = MeasureContext(f, rng_factory=lambda key: _stream(seed, index, key))
    results = []
    for relation in relations:
        try:
            results.append((relation, relation.check(ctx, tolerance), None))
        except BftkError as exc:
            results.append((relation, None, exc))
        except Exception as exc:
            logger.warning(f"{relation.id} raised {type(exc).__name__} on {f.spec}: {exc}")
            results.append((relation, None, exc))
    return results


def run_shard(
    n: int, mode: str, seed: int, start: int, stop: int, relation_ids: Sequence[str], tolerance: Optional[float]
) -> ShardResult:
    """Worker entry point; stateless apart from per-process measure caches."""
    relations = resolve_relations(relation_ids, n)
    shard = ShardResult(start, stop, {r.id: RelationTally() for r in relations})
    for index in range(start, stop):
        f = campaign_function(n, index, mode, seed)
        for relation, outcome, error in check_function(f, relations, seed, index, tolerance):
            tally = shard.tallies[relation.id]
            tally.checked += 1
            if error is not None:
                tally.failed += 1
                detail = str(error) if isinstance(error, BftkError) else f"{type(error).__name__}: {error}"
                shard.failures.append(RelationFailure(relation=relation.id, fspec=f.spec, detail=detail))
                continue
            if outcome.skipped:
                tally.skipped += 1
                continue
            tally.add_margin(outcome.margin)
            if outcome.passed:
                tally.passed += 1
            else:
                tally.failed += 1
                shard.failures.append(
                    RelationFailure(
                        relation=relation.id,
                        fspec=f.spec,
                        lhs=_rounded(outcome.lhs),
                        rhs=_rounded(outcome.rhs),
                        detail=outcome.detail,
                    )
                )
    return shard


def _shard_bounds(count: int, jobs: int) -> List[tuple]:
    if count == 0:
        return []
    shards = min(count, max(1, jobs * SHARDS_PER_JOB))
    edges = np.linspace(0, count, shards + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


async def run_campaign(
    n: int,
    count: int,
    mode: str,
    seed: int,
    relation_ids: Sequence[str],
    jobs: int,
    tolerance: Optional[float] = None,
) -> CampaignReport:
    relations = resolve_relations(relation_ids, n)
    ids = [r.id for r in relations]
    bounds = _shard_bounds(count, jobs)
    logger.info(f"Campaign {mode} n={n}: {count} functions, {len(ids)} relations, {len(bounds)} shards, {jobs} jobs")
    started = time.perf_counter()

    if jobs <= 1 or len(bounds) <= 1:
        shards = [run_shard(n, mode, seed, a, b, ids, tolerance) for a, b in bounds]
    else:
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            tasks = [
                loop.run_in_executor(pool, run_shard, n, mode, seed, a, b, ids, tolerance) for a, b in bounds
            ]
            shards = await asyncio.gather(*tasks)

    totals = {r.id: RelationTally() for r in relations}
    failures: List[RelationFailure] = []
    for shard in sorted(shards, key=lambda s: s.start):
        for relation_id, tally in shard.tallies.items():
            totals[relation_id].merge(tally)
        failures.extend(shard.failures)

    elapsed = time.perf_counter() - started
    summaries = [
        RelationSummary(
            id=r.id,
            citation=r.citation,
            checked=totals[r.id].checked,
            passed=totals[r.id].passed,
            failed=totals[r.id].failed,
            skipped=totals[r.id].skipped,
            worst_margin=_rounded(totals[r.id].worst_margin),
        )
        for r in relations
    ]
    report = CampaignReport(
        campaign_id=f"{mode}-n{n}-count{count}-seed{seed}",
        mode=mode,
        n=n,
        seed=seed,
        function_count=count,
        relations=summaries,
        failures=failures,
        elapsed_seconds=round(elapsed, 3),
    )
    if failures:
        logger.error(f"Campaign {report.campaign_id}: {len(failures)} failures")
    else:
        logger.info(f"Campaign {report.campaign_id} passed in {elapsed:.2f}s")
    return report


async def verify_exhaustive_async(
    n: int, relations: Sequence[str] = ("all",), jobs: Optional[int] = None, seed: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> CampaignReport:
    if n < 0:
        raise PreconditionError(f"arity must be nonnegative, got {n}")
    if n > EXHAUSTIVE_MAX_ARITY:
        raise ArityCapError("verify exhaustive", n, EXHAUSTIVE_MAX_ARITY)
    count = 1 << (1 << n)
    return await run_campaign(n, count, "exhaustive", settings.SEED if seed is None else seed, relations,
                              jobs or settings.JOBS, tolerance)


async def verify_random_async(
    n: int, count: int, seed: Optional[int] = None, relations: Sequence[str] = ("all",),
    jobs: Optional[int] = None, tolerance: Optional[float] = None,
) -> CampaignReport:
    if count < 0:
        raise PreconditionError(f"count must be nonnegative, got {count}")
    if n < 0:
        raise PreconditionError(f"arity must be nonnegative, got {n}")
    return await run_campaign(n, count, "random", settings.SEED if seed is None else seed, relations,
                              jobs or settings.JOBS, tolerance)


def verify_exhaustive(
    n: int, relations: Sequence[str] = ("all",), jobs: Optional[int] = None, seed: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> CampaignReport:
    """Check the relations on all 2^(2^n) functions, in truth-table order."""
    return asyncio.run(verify_exhaustive_async(n, relations, jobs, seed, tolerance))


def verify_random(
    n: int, count: int, seed: Optional[int] = None, relations: Sequence[str] = ("all",),
    jobs: Optional[int] = None, tolerance: Optional[float] = None,
) -> CampaignReport:
    """Check the relations on ``count`` uniformly random functions of arity ``n``."""
    return asyncio.run(verify_random_async(n, count, seed, relations, jobs, tolerance))


DEFAULT_MEASURES = ("s0", "s1", "s", "avg_sensitivity", "bs", "C0", "C1", "C", "D", "deg", "deg2", "lambda")

MEASURE_ALIASES = {
    "avg": "avg_sensitivity",
    "c": "C",
    "c0": "C0",
    "c1": "C1",
    "d": "D",
    "k": "koutsoupias",
    "lam": "lambda",
}

MEASURE_IDS = set(DEFAULT_MEASURES) | {"koutsoupias", "adeg"}

# default measures above their cap are left out rather than raising
DEFAULT_MEASURE_CAPS = {
    "bs": BS_MAX_ARITY,
    "C0": CERT_MAX_ARITY,
    "C1": CERT_MAX_ARITY,
    "C": CERT_MAX_ARITY,
    "D": DQ_MAX_ARITY,
}


def measure_cmd(
    fspec: str, measures: Optional[Sequence[str]] = None, epsilon: float = DEFAULT_EPSILON
) -> MeasureRecord:
    """One record with the requested measures of the function named by ``fspec``.

    Without ``measures`` the default set is used, minus the measures whose
    arity cap ``f`` exceeds.  Measures named explicitly are never dropped.
    """
    f = load_function(fspec)
    if measures is None:
        measures = [m for m in DEFAULT_MEASURES if f.n <= DEFAULT_MEASURE_CAPS.get(m, f.n)]
        dropped = [m for m in DEFAULT_MEASURES if m not in measures]
        if dropped:
            logger.info(f"Leaving out {', '.join(dropped)} for {f.spec}: arity {f.n} exceeds their caps")
    wanted = []
    for name in measures:
        key = MEASURE_ALIASES.get(name.strip(), name.strip())
        if key not in MEASURE_IDS:
            raise PreconditionError(f"unknown measure '{name}'; known: {', '.join(sorted(MEASURE_IDS))}")
        wanted.append(key)

    values: Dict[str, object] = {}
    if {"s0", "s1", "s", "avg_sensitivity"} & set(wanted):
        sens = sensitivity(f)
        values.update(s0=sens.s0, s1=sens.s1, s=sens.s, avg_sensitivity=sens.avg_sensitivity)
    if "bs" in wanted:
        values["bs"] = block_sensitivity(f).bs
    if {"C0", "C1", "C"} & set(wanted):
        cert = certificate_complexity(f)
        values.update(C0=cert.c0, C1=cert.c1, C=cert.c)
    if "D" in wanted:
        values["D"] = det_query_complexity(f)
    if "deg" in wanted:
        values["deg"] = degree(f)
    if "deg2" in wanted:
        values["deg2"] = degree_gf2(f)
    if "lambda" in wanted:
        values["lambda"] = spectral_sensitivity(f).value
    if "koutsoupias" in wanted:
        values["koutsoupias"] = koutsoupias(f)
    if "adeg" in wanted:
        values["adeg"] = approx_degree(f, epsilon).degree
        values["adeg_epsilon"] = epsilon

    kept = {k: v for k, v in values.items() if k in wanted or k == "adeg_epsilon"}
    logger.debug(f"Measured {f.spec}: {kept}")
    return MeasureRecord(fspec=f.spec, n=f.n, **kept)
