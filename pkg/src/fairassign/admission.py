"""School admission under implicit bias.

Scores are drawn, disadvantaged students' scores are distorted, and the
committee builds a random priority by sampling bias factors from their
posterior and ranking the debiased scores. Six mechanisms are then compared
by their number of stochastic envy pairs.

Floating point is confined to score generation and posterior sampling.
Everything downstream of the random priority is exact.
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .audit import count_envy_pairs
from .eating import cycle_elimination, unit_time_eating
from .lottery import serial_dictatorship
from .model import Instance, InvalidInput, Lottery, RandomAssignment, RandomPriority, assignment_from_lottery

ALGORITHMS = ("N", "RN", "R", "RR", "CE", "UTE")
CSV_COLUMNS = ("ell", "beta", "bias_model", "algorithm", "mean_envy_pairs", "trials", "q", "seed")
GRID_POINTS = 10_000
TAIL_MASS = 1e-6


@dataclass(frozen=True)
class Exponential:
    rate: float

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.where(x >= 0, x, 0.0)), 0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.rate, size)

    def support(self) -> tuple[float, float]:
        return 0.0, -math.log(TAIL_MASS) / self.rate


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)

    def support(self) -> tuple[float, float]:
        return self.lo, self.hi


Distribution = Exponential | Uniform


@dataclass(frozen=True)
class AdmissionConfig:
    students: int = 35
    disadvantaged: int = 10
    schools: int = 2
    beta: float = 0.5
    bias_model: str = "multiplicative"
    q: int = 200
    trials: int = 20
    seed: int = 0
    capacities: tuple[int, ...] | None = None
    capability: Distribution | None = None
    bias: Distribution | None = None

    def __post_init__(self) -> None:
        if self.bias_model not in ("multiplicative", "additive"):
            raise InvalidInput(f"unknown bias model {self.bias_model!r}")
        if not 0 <= self.disadvantaged <= self.students:
            raise InvalidInput("disadvantaged count must lie in [0, students]")
        if self.schools < 1:
            raise InvalidInput("need at least one school")
        if self.beta <= 0:
            raise InvalidInput("beta must be positive")
        if self.q < 1 or self.trials < 1:
            raise InvalidInput("q and trials must be at least 1")
        caps = self.seat_capacities
        if len(caps) != self.schools or any(c < 0 for c in caps):
            raise InvalidInput(f"capacities {caps} do not match {self.schools} schools")
        if sum(caps) > self.students:
            raise InvalidInput("school capacities exceed the number of students")

    @property
    def seat_capacities(self) -> tuple[int, ...]:
        if self.capacities is not None:
            return tuple(self.capacities)
        per = self.students // (self.schools + 1)
        return (per,) * self.schools

    @property
    def dummy_capacity(self) -> int:
        return self.students - sum(self.seat_capacities)

    @property
    def capability_dist(self) -> Distribution:
        if self.capability is not None:
            return self.capability
        return Exponential(1.0) if self.bias_model == "multiplicative" else Uniform(0.0, 2.0)

    @property
    def bias_dist(self) -> Distribution:
        if self.bias is not None:
            return self.bias
        return Exponential(self.beta) if self.bias_model == "multiplicative" else Uniform(0.0, self.beta)


@dataclass(frozen=True)
class ScoreSet:
    true: np.ndarray
    bias: np.ndarray
    perceived: np.ndarray


def _rng(seed_or_rng: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.Generator(np.random.PCG64(seed_or_rng))


def apply_bias(true: np.ndarray, bias: np.ndarray, model: str) -> np.ndarray:
    perceived = np.array(true, dtype=float)
    k = len(bias)
    perceived[:k] = true[:k] * bias if model == "multiplicative" else true[:k] + bias
    return perceived


def sample_scores(config: AdmissionConfig, seed: int | np.random.Generator) -> ScoreSet:
    """Students 0..n_dis-1 are disadvantaged; the rest are perceived truthfully."""
    rng = _rng(seed)
    true = config.capability_dist.sample(rng, config.students)
    bias = config.bias_dist.sample(rng, config.disadvantaged)
    return ScoreSet(true, bias, apply_bias(true, bias, config.bias_model))


@dataclass(frozen=True)
class PosteriorSampler:
    grid: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    normalizer: float

    def integral(self) -> float:
        return float(np.sum((self.density[1:] + self.density[:-1]) * np.diff(self.grid)) / 2)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Inverse CDF by binary search, interpolating linearly inside the cell."""
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.searchsorted(self.cdf, u, side="left"), 1, len(self.cdf) - 1)
        lo, hi = self.cdf[idx - 1], self.cdf[idx]
        width = hi - lo
        frac = np.divide(u - lo, width, out=np.zeros_like(u), where=width > 0)
        return self.grid[idx - 1] + frac * (self.grid[idx] - self.grid[idx - 1])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.quantile(rng.random(size))


def posterior_sampler(perceived: float, config: AdmissionConfig) -> PosteriorSampler:
    """Tabulate f_B(b) f_D(x_hat / b) (or f_D(x_hat - b) for additive bias), normalised."""
    lo, hi = config.bias_dist.support()
    grid = np.linspace(lo, hi, GRID_POINTS)
    prior = config.bias_dist.pdf(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        if config.bias_model == "multiplicative":
            implied = np.where(grid > 0, perceived / np.where(grid > 0, grid, 1.0), np.inf)
        else:
            implied = perceived - grid
    likelihood = np.where(np.isfinite(implied), config.capability_dist.pdf(np.where(np.isfinite(implied), implied, 0.0)), 0.0)
    unnorm = prior * likelihood
    z = float(np.sum((unnorm[1:] + unnorm[:-1]) * np.diff(grid)) / 2)
    if not z > 0:
        raise InvalidInput(f"posterior for perceived score {perceived} vanishes on the grid")
    density = unnorm / z
    cdf = np.concatenate(([0.0], np.cumsum((density[1:] + density[:-1]) * np.diff(grid) / 2)))
    cdf /= cdf[-1]
    return PosteriorSampler(grid, density, cdf, z)


def ranking(scores: Sequence[float]) -> tuple[int, ...]:
    """Students by descending score; ties go to the lower index."""
    scores = np.asarray(scores, dtype=float)
    return tuple(int(i) for i in np.lexsort((np.arange(len(scores)), -scores)))


def priority_from_bias_draws(perceived: np.ndarray, draws: np.ndarray, model: str) -> RandomPriority:
    """One order per row of ``draws`` (q x n_dis bias samples), each weighted 1/q."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    q, k = draws.shape
    weight = Fraction(1, q)
    orders = []
    for row in draws:
        debiased = np.array(perceived, dtype=float)
        with np.errstate(divide="ignore"):
            debiased[:k] = perceived[:k] / row if model == "multiplicative" else perceived[:k] - row
        orders.append((ranking(debiased), weight))
    return RandomPriority(orders, n=len(perceived))


def sample_random_priority(
    scores: ScoreSet, config: AdmissionConfig, seed: int | np.random.Generator
) -> RandomPriority:
    rng = _rng(seed)
    k = config.disadvantaged
    draws = np.empty((config.q, k))
    for i in range(k):
        draws[:, i] = posterior_sampler(float(scores.perceived[i]), config).sample(rng, config.q)
    return priority_from_bias_draws(scores.perceived, draws, config.bias_model)


def seat_names(capacities: Sequence[int], dummy: int) -> list[str]:
    names = [f"s{k + 1}_{j + 1}" for k, c in enumerate(capacities) for j in range(c)]
    return names + [f"dummy_{j + 1}" for j in range(dummy)]


def induce_seat_preferences(
    school_prefs: Sequence[Sequence[int]], capacities: Sequence[int], dummy: int = 0
) -> list[list[int]]:
    """Expand per-student school rankings into seat rankings.

    Seats are indexed school by school with dummy seats last. All seats of a
    preferred school come before any seat of a less preferred one, lower seat
    indices first; dummy seats are ranked last by everyone.
    """
    if any(c < 0 for c in capacities) or dummy < 0:
        raise InvalidInput("capacities must be non-negative")
    offsets = np.concatenate(([0], np.cumsum(capacities))).astype(int)
    total = int(offsets[-1]) + dummy
    out = []
    for pref in school_prefs:
        if sorted(pref) != list(range(len(capacities))):
            raise InvalidInput(f"school preference {list(pref)} is not a permutation of {len(capacities)} schools")
        seats = [int(offsets[s]) + j for s in pref for j in range(capacities[s])]
        seats.extend(range(int(offsets[-1]), total))
        out.append(seats)
    return out


def rooney_reorder(order: Sequence[int], disadvantaged: Iterable[int], n_students: int, n_dis: int) -> tuple[int, ...]:
    """Interleave disadvantaged candidates to keep their share of every prefix near n_dis/N.

    The next disadvantaged candidate is placed when placing an advantaged one
    would drop the disadvantaged share of the filled prefix below n_dis/N, or
    when that candidate outranks the next advantaged one.
    """
    dis = set(disadvantaged)
    a = [s for s in order if s in dis]
    b = [s for s in order if s not in dis]
    pos = {s: r for r, s in enumerate(order)}
    i = j = 0
    out = []
    while i + j < len(order):
        if i == len(a):
            take_dis = False
        elif j == len(b):
            take_dis = True
        else:
            # i / (i + j + 1) < n_dis / N, cross-multiplied
            take_dis = i * n_students < n_dis * (i + j + 1) or pos[a[i]] < pos[b[j]]
        if take_dis:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    return tuple(out)


def stable_match(order: Sequence[int], inst: Instance) -> tuple[int, ...]:
    """Student-proposing deferred acceptance where every seat ranks students by ``order``."""
    pos = [0] * inst.n
    for r, s in enumerate(order):
        pos[s] = r
    holder = [-1] * inst.m
    nxt = [0] * inst.n
    free = list(reversed(range(inst.n)))
    while free:
        s = free.pop()
        seat = inst.preferences[s][nxt[s]]
        nxt[s] += 1
        cur = holder[seat]
        if cur == -1:
            holder[seat] = s
        elif pos[s] < pos[cur]:
            holder[seat] = s
            free.append(cur)
        else:
            free.append(s)
    match = [-1] * inst.n
    for seat, s in enumerate(holder):
        if s != -1:
            match[s] = seat
    result = tuple(match)
    assert result == serial_dictatorship(order, inst), "common-priority DA must equal serial dictatorship"
    return result


def _point_mass(f: Sequence[int], m: int) -> RandomAssignment:
    return assignment_from_lottery(Lottery([(f, 1)], m=m))


def build_trial(config: AdmissionConfig, seed: int) -> tuple[Instance, RandomPriority, tuple[int, ...]]:
    """Draw one admission instance: seat preferences, the random priority and the perceived ranking."""
    rng = _rng(seed)
    scores = sample_scores(config, rng)
    school_prefs = [rng.permutation(config.schools).tolist() for _ in range(config.students)]
    caps = config.seat_capacities
    prefs = induce_seat_preferences(school_prefs, caps, config.dummy_capacity)
    inst = Instance(
        tuple(str(s + 1) for s in range(config.students)),
        tuple(seat_names(caps, config.dummy_capacity)),
        tuple(tuple(p) for p in prefs),
    )
    priority = sample_random_priority(scores, config, rng)
    return inst, priority, ranking(scores.perceived)


def run_trial(config: AdmissionConfig, seed: int) -> dict[str, int]:
    """Envy-pair counts of the six mechanisms on one sampled instance."""
    inst, priority, perceived_order = build_trial(config, seed)
    dis = range(config.disadvantaged)

    def rooney(order: Sequence[int]) -> tuple[int, ...]:
        return rooney_reorder(order, dis, config.students, config.disadvantaged)

    assignments = {
        "N": _point_mass(stable_match(perceived_order, inst), inst.m),
        "RN": assignment_from_lottery(
            Lottery(((stable_match(o, inst), w) for o, w in priority.entries), m=inst.m)
        ),
        "R": _point_mass(stable_match(rooney(perceived_order), inst), inst.m),
        "RR": assignment_from_lottery(
            Lottery(((stable_match(rooney(o), inst), w) for o, w in priority.entries), m=inst.m)
        ),
        "CE": cycle_elimination(inst, priority),
        "UTE": unit_time_eating(inst, priority),
    }
    return {alg: count_envy_pairs(p, priority, inst)[0] for alg, p in assignments.items()}


def trial_workers() -> int:
    """Worker cap from FAIR_ASSIGN_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("FAIR_ASSIGN_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInput(f"FAIR_ASSIGN_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise InvalidInput("FAIR_ASSIGN_THREADS must be non-negative")
    return value or (os.cpu_count() or 1)


def _run_trial_args(args: tuple[AdmissionConfig, int]) -> dict[str, int]:
    return run_trial(*args)


@dataclass
class ExperimentResult:
    config: AdmissionConfig
    counts: list[dict[str, int]] = field(default_factory=list)

    def mean(self, alg: str) -> Fraction:
        return Fraction(sum(c[alg] for c in self.counts), len(self.counts))

    def rows(self) -> list[dict[str, str]]:
        cfg = self.config
        return [
            {
                "ell": str(cfg.schools),
                "beta": repr(float(cfg.beta)),
                "bias_model": cfg.bias_model,
                "algorithm": alg,
                "mean_envy_pairs": f"{float(self.mean(alg)):.4f}",
                "trials": str(cfg.trials),
                "q": str(cfg.q),
                "seed": str(cfg.seed),
            }
            for alg in ALGORITHMS
        ]


def run_experiment(config: AdmissionConfig, workers: int | None = None) -> ExperimentResult:
    """Run ``config.trials`` trials; trial k is seeded with ``config.seed + k``."""
    workers = trial_workers() if workers is None else workers
    jobs = [(config, config.seed + k) for k in range(config.trials)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            counts = list(pool.map(_run_trial_args, jobs))
    else:
        counts = [run_trial(*job) for job in jobs]
    return ExperimentResult(config, counts)


def run_grid(
    base: AdmissionConfig, schools: Sequence[int], betas: Sequence[float], workers: int | None = None
) -> list[ExperimentResult]:
    return [run_experiment(replace(base, schools=ell, beta=beta), workers) for ell in schools for beta in betas]


def results_to_csv(results: Iterable[ExperimentResult]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerows(res.rows())
    return buf.getvalue()
