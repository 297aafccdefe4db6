"""Monte Carlo runs of the (1+1)-EA on OneMax and LeadingOnes.

Two engines share one interface:

``bits``
    Real bit strings. Steps in which no bit flips are skipped in bulk (the
    wait is geometric); otherwise the number of flipped bits is drawn from a
    zero-truncated binomial and that many distinct positions are flipped.
    The offspring replaces the parent when its fitness is not smaller.
``chain``
    The fitness-level jump chain: a geometric holding time in each deficit,
    then a jump drawn from the one-step kernel. Much faster; valid for
    OneMax at any start and for LeadingOnes when the bits behind the first
    zero are fair coins (deficit and uniform starts).

Replicates are split into fixed-size blocks, each with its own Philox stream
spawned from the seed, so results do not depend on the number of workers.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import TextIO

import numpy as np
from scipy import stats

from .distributions import DiscreteCdf
from .transition import lam

__all__ = [
    "SimulationConfig",
    "EmpiricalSummary",
    "run_batch",
    "empirical_cdf",
    "transition_frequencies",
    "InsufficientSample",
]

BLOCK = 8192
SCHEMA_VERSION = 1


class InsufficientSample(ValueError):
    pass


@dataclass(frozen=True)
class SimulationConfig:
    """One batch of independent runs.

    ``start`` is ``"deficit"`` (exactly ``m`` zeros for OneMax; ``n - m``
    leading ones followed by a zero and fair coins for LeadingOnes),
    ``"binomial"`` (each bit is 0 with probability ``rho``) or ``"uniform"``.
    ``p`` defaults to ``1/n`` and ``step_cap`` to ``200 e n (log n + 1)``.
    """

    n: int
    fitness: str = "onemax"
    p: float | None = None
    start: str = "deficit"
    m: int | None = None
    rho: float | None = None
    replicates: int = 1000
    seed: int = 0
    step_cap: int | None = None
    engine: str = "bits"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.fitness not in ("onemax", "leadingones"):
            raise ValueError(f"unknown fitness {self.fitness!r}")
        if not 0 < self.mutation_rate < 1:
            raise ValueError("need 0 < p < 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.cap < 1:
            raise ValueError("step cap must be >= 1")
        if self.engine not in ("bits", "chain"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.start == "deficit":
            if self.m is None or not 0 <= self.m <= self.n:
                raise ValueError("deficit start needs 0 <= m <= n")
        elif self.start == "binomial":
            if self.rho is None or not 0 <= self.rho <= 1:
                raise ValueError("binomial start needs 0 <= rho <= 1")
            if self.engine == "chain" and self.fitness == "leadingones" and self.rho != 0.5:
                raise ValueError("the chain engine needs fair tail bits for LeadingOnes")
        elif self.start != "uniform":
            raise ValueError(f"unknown start {self.start!r}")

    @property
    def mutation_rate(self) -> float:
        return 1.0 / self.n if self.p is None else float(self.p)

    @property
    def cap(self) -> int:
        if self.step_cap is not None:
            return int(self.step_cap)
        n = self.n
        return math.ceil(200 * math.e * n * (math.log(n) + 1))

    def resolved(self) -> dict:
        d = asdict(self)
        d["p"] = self.mutation_rate
        d["step_cap"] = self.cap
        return d


@dataclass
class EmpiricalSummary:
    config: SimulationConfig
    steps: np.ndarray
    start_m: np.ndarray
    censored: np.ndarray

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def uncensored(self) -> np.ndarray:
        return self.steps[~self.censored]

    @property
    def count(self) -> int:
        return int(self.uncensored.size)

    @property
    def censored_count(self) -> int:
        return int(self.censored.sum())

    @property
    def mean(self) -> float:
        return float(self.uncensored.mean()) if self.count else math.nan

    @property
    def variance(self) -> float:
        return float(self.uncensored.var(ddof=1)) if self.count > 1 else math.nan

    @property
    def skewness(self) -> float:
        """Sample skewness ``m3 / m2^1.5`` of the uncensored times."""
        if self.count < 3:
            return math.nan
        return float(stats.skew(self.uncensored))

    def histogram(self) -> tuple:
        """``(values, counts)`` of the uncensored hitting times."""
        return np.unique(self.uncensored, return_counts=True)

    def as_dict(self) -> dict:
        return dict(schema_version=SCHEMA_VERSION, config=self.config.resolved(),
                    count=self.count, censored=self.censored_count,
                    mean=self.mean, variance=self.variance, skewness=self.skewness)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replicate_id", "start_m", "steps", "censored"])
        for i, (m, s, c) in enumerate(zip(self.start_m, self.steps, self.censored)):
            w.writerow([i, int(m), int(s), int(c)])


# ---------------------------------------------------------------------------
# starts


def _initial_bits(cfg: SimulationConfig, rng: np.random.Generator, R: int) -> np.ndarray:
    n = cfg.n
    if cfg.start == "uniform":
        return rng.integers(0, 2, size=(R, n), dtype=np.int8)
    if cfg.start == "binomial":
        return (rng.random((R, n)) >= cfg.rho).astype(np.int8)
    m = cfg.m
    if cfg.fitness == "onemax":
        x = np.ones((R, n), dtype=np.int8)
        if m:
            pos = np.argsort(rng.random((R, n)), axis=1)[:, :m]
            np.put_along_axis(x, pos, 0, axis=1)
        return x
    x = np.ones((R, n), dtype=np.int8)
    if m:
        L = n - m
        x[:, L] = 0
        x[:, L + 1:] = rng.integers(0, 2, size=(R, m - 1), dtype=np.int8)
    return x


def _leading_ones(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    z = x == 0
    return np.where(z.any(axis=1), z.argmax(axis=1), n)


def _fitness_deficit(cfg: SimulationConfig, x: np.ndarray) -> np.ndarray:
    if cfg.fitness == "onemax":
        return cfg.n - x.sum(axis=1).astype(np.int64)
    return cfg.n - _leading_ones(x)


# ---------------------------------------------------------------------------
# bits engine


def _flip_count_table(n: int, p: float) -> np.ndarray:
    """CDF of Binomial(n, p) conditioned on at least one flip."""
    k = np.arange(1, n + 1)
    pmf = stats.binom.pmf(k, n, p)
    cdf = np.cumsum(pmf) / pmf.sum()
    cut = int(np.searchsorted(cdf, 1.0 - 1e-17)) + 1
    cdf = cdf[:cut]
    cdf[-1] = 1.0
    return cdf


def _distinct_positions(rng, K: np.ndarray, n: int) -> np.ndarray:
    """``(R, max K)`` positions, distinct within each row; ``-1`` pads."""
    R = K.size
    kmax = int(K.max()) if R else 0
    pos = np.full((R, kmax), -1, dtype=np.int64)
    for j in range(kmax):
        rows = np.nonzero(K > j)[0]
        cand = rng.integers(0, n, size=rows.size)
        while True:
            dup = np.zeros(rows.size, dtype=bool)
            for i in range(j):
                dup |= pos[rows, i] == cand
            if not dup.any():
                break
            cand[dup] = rng.integers(0, n, size=int(dup.sum()))
        pos[rows, j] = cand
    return pos


def _apply_flips(x, active, pos, mask) -> None:
    # one column at a time so every (row, position) pair is unique
    for j in range(pos.shape[1]):
        rows = np.nonzero(mask[:, j])[0]
        x[active[rows], pos[rows, j]] ^= 1


def _run_bits(cfg: SimulationConfig, rng: np.random.Generator, R: int) -> tuple:
    n, p, cap = cfg.n, cfg.mutation_rate, cfg.cap
    x = _initial_bits(cfg, rng, R)
    deficit = _fitness_deficit(cfg, x)
    start_m = deficit.copy()
    t = np.zeros(R, dtype=np.int64)
    censored = np.zeros(R, dtype=bool)
    p_any = -math.expm1(n * math.log1p(-p))
    kcdf = _flip_count_table(n, p)
    active = np.nonzero(deficit > 0)[0]
    while active.size:
        a = active.size
        t[active] += rng.geometric(p_any, size=a)
        over = t[active] > cap
        if over.any():
            censored[active[over]] = True
            t[active[over]] = cap
            active = active[~over]
            a = active.size
            if not a:
                break
        K = np.searchsorted(kcdf, rng.random(a), side="right") + 1
        pos = _distinct_positions(rng, K, n)
        valid = pos >= 0
        safe = np.where(valid, pos, 0)
        bits = x[active[:, None], safe]
        if cfg.fitness == "onemax":
            # zeros flipped to one minus ones flipped to zero
            gain = np.where(valid, np.where(bits == 0, 1, -1), 0).sum(axis=1)
            accept = gain >= 0
            _apply_flips(x, active, pos, valid & accept[:, None])
            new_def = deficit[active] - gain
            assert np.all(new_def[accept] <= deficit[active][accept])
            deficit[active[accept]] = new_def[accept]
        else:
            L = n - deficit[active]
            hit_prefix = (valid & (pos < L[:, None])).any(axis=1)
            accept = ~hit_prefix
            _apply_flips(x, active, pos, valid & accept[:, None])
            improved = accept & (valid & (pos == L[:, None])).any(axis=1)
            if improved.any():
                r = active[improved]
                old = deficit[r]
                deficit[r] = n - _leading_ones(x[r])
                assert np.all(deficit[r] < old)
        active = active[deficit[active] > 0]
    return t, start_m, censored


# ---------------------------------------------------------------------------
# chain engine


def _start_deficits(cfg: SimulationConfig, rng: np.random.Generator, R: int) -> np.ndarray:
    n = cfg.n
    if cfg.start == "deficit":
        return np.full(R, cfg.m, dtype=np.int64)
    rho = 0.5 if cfg.start == "uniform" else cfg.rho
    if cfg.fitness == "onemax":
        return rng.binomial(n, rho, size=R).astype(np.int64)
    # leading ones of fair coins: min(Geometric(1/2) - 1, n)
    lead = np.minimum(rng.geometric(0.5, size=R) - 1, n)
    return n - lead


def _onemax_chain_tables(n: int, p: float) -> tuple:
    if abs(p - 1.0 / n) > 1e-15:
        raise ValueError("the OneMax chain engine uses the rate 1/n kernel")
    total = np.zeros(n + 1)
    cum = np.ones((n + 1, n + 1))
    for m in range(1, n + 1):
        row = np.array([lam(n, m, ell, exact=False) for ell in range(1, m + 1)])
        total[m] = row.sum()
        cum[m, :m] = np.cumsum(row) / total[m]
        cum[m, m - 1:] = 1.0
    return total, cum


def _run_chain(cfg: SimulationConfig, rng: np.random.Generator, R: int) -> tuple:
    n, p, cap = cfg.n, cfg.mutation_rate, cfg.cap
    deficit = _start_deficits(cfg, rng, R)
    start_m = deficit.copy()
    t = np.zeros(R, dtype=np.int64)
    censored = np.zeros(R, dtype=bool)
    if cfg.fitness == "onemax":
        total, cum = _onemax_chain_tables(n, p)
    else:
        q = 1.0 - p
        total = p * q ** (n - np.arange(n + 1, dtype=float))
    active = np.nonzero(deficit > 0)[0]
    while active.size:
        d = deficit[active]
        t[active] += rng.geometric(total[d])
        over = t[active] > cap
        if over.any():
            censored[active[over]] = True
            t[active[over]] = cap
            active, d = active[~over], d[~over]
            if not active.size:
                break
        if cfg.fitness == "onemax":
            u = rng.random(active.size)
            ell = (u[:, None] >= cum[d, :n]).sum(axis=1) + 1
        else:
            ell = np.minimum(rng.geometric(0.5, size=active.size), d)
        deficit[active] = d - ell
        active = active[deficit[active] > 0]
    return t, start_m, censored


# ---------------------------------------------------------------------------


def run_batch(cfg: SimulationConfig, workers: int = 1) -> EmpiricalSummary:
    """Hitting times of the optimum for ``cfg.replicates`` independent runs.

    Deterministic given ``cfg.seed``; ``workers`` only changes wall time.
    """
    nblocks = -(-cfg.replicates // BLOCK)
    seeds = np.random.SeedSequence(cfg.seed).spawn(nblocks)
    sizes = [min(BLOCK, cfg.replicates - i * BLOCK) for i in range(nblocks)]
    runner = _run_bits if cfg.engine == "bits" else _run_chain

    def block(i):
        return runner(cfg, np.random.Generator(np.random.Philox(seeds[i])), sizes[i])

    if workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(block, range(nblocks)))
    else:
        parts = [block(i) for i in range(nblocks)]
    steps, start_m, censored = (np.concatenate(z) for z in zip(*parts))
    return EmpiricalSummary(cfg, steps, start_m, censored)


def empirical_cdf(summary: EmpiricalSummary, min_count: int = 100) -> DiscreteCdf:
    """Right-continuous step CDF of the uncensored hitting times.

    Censored runs count as mass beyond the last observed value.
    """
    if summary.count < min_count:
        raise InsufficientSample(f"need at least {min_count} uncensored runs, got {summary.count}")
    times = summary.uncensored
    total = summary.steps.size
    counts = np.bincount(times)
    return DiscreteCdf(np.cumsum(counts) / total, 0, False)


@dataclass
class TransitionCounts:
    """Outcome counts of single steps from a fixed deficit ``m``."""

    n: int
    m: int
    fitness: str
    trials: int
    counts: np.ndarray = field(repr=False)

    def frequency(self, ell: int) -> float:
        return self.counts[ell] / self.trials

    def standard_error(self, prob: float) -> float:
        return math.sqrt(prob * (1 - prob) / self.trials)


def transition_frequencies(n: int, m: int, fitness: str = "onemax", trials: int = 10 ** 6,
                           seed: int = 0, p: float | None = None, block: int = 50000) -> TransitionCounts:
    """Run one full mutation-and-selection step ``trials`` times from a fresh
    random string with deficit ``m`` and count the jump sizes ``ell``
    (``counts[0]`` is the number of steps without improvement).

    Every bit is flipped independently here, with no event skipping, so this
    checks the kernel against bare bit operations.
    """
    cfg = SimulationConfig(n, fitness, p, "deficit", m, replicates=1, seed=seed)
    pr = cfg.mutation_rate
    counts = np.zeros(m + 1, dtype=np.int64)
    seeds = np.random.SeedSequence(seed).spawn(-(-trials // block))
    done = 0
    for ss in seeds:
        rng = np.random.Generator(np.random.Philox(ss))
        B = min(block, trials - done)
        x = _initial_bits(cfg, rng, B)
        before = _fitness_deficit(cfg, x)
        y = x ^ (rng.random((B, n)) < pr).astype(np.int8)
        after = _fitness_deficit(cfg, y)
        new = np.where(after <= before, after, before)
        counts += np.bincount(before - new, minlength=m + 1)
        done += B
    return TransitionCounts(n, m, fitness, trials, counts)
