"""Synthetic data generators and the Monte Carlo harness.

Two single-sample scenarios produce spiked-covariance data with a
Gaussian bulk and a heavy-tailed block (scaled t, identity covariance)
occupying the last ceil(sqrt(d)) coordinates, so the first principal
component stays Gaussian. The two-sample generator builds a pair of
block covariances (2x2 spike plus AR(1) tail) that are equal under the
null and differ by a known eigenvalue ratio, direction rotation, and
tail-mass factor under the alternative.

Replications are embarrassingly parallel. Each replication draws from
its own counter-based substream keyed by (seed, d, replication, arm),
and results land in per-replication slots before aggregation, so a run
is byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .estimators import nr_estimate, score_mse
from .inference import test_f1, test_f2, test_f3
from .linalg import DataMatrix
from .sampling import (
    Seed,
    make_stream,
    sample_scaled_t_vector,
    sample_std_normal,
)

__all__ = [
    "SpikeScenario",
    "TwoSampleScenario",
    "SpikedSample",
    "TwoSampleDraw",
    "TwoSampleTruth",
    "EstimationRow",
    "TestRow",
    "McSummary",
    "spike_eigenvalues",
    "gen_spiked",
    "gen_ar1",
    "gen_two_sample",
    "run_estimation_mc",
    "run_test_mc",
]

_T_DF = 10
_TAIL_RHO = 0.3


@dataclass(frozen=True)
class SpikeScenario:
    """Single-sample spiked model: model 'a' has eigenvalues d^(1/i),
    model 'b' has d^(3/(2+2i)); the population eigenvectors are the
    coordinate axes."""

    model: str
    d: int
    n: int
    seed: Seed

    def __post_init__(self):
        if self.model not in ("a", "b"):
            raise ValueError(f"model must be 'a' or 'b', got {self.model!r}")
        if self.d < 4:
            raise ValueError(f"need d >= 4, got {self.d}")
        if self.n < 3:
            raise ValueError(f"need n >= 3, got {self.n}")


@dataclass(frozen=True)
class TwoSampleScenario:
    """Two Gaussian samples with block covariances; 'H0' makes them
    equal, 'Ha' scales the spike by 3 and 1.5, rotates it, and scales
    the AR(1) tail by 1.5."""

    hypothesis: str
    d: int
    n1: int
    n2: int
    seed: Seed

    def __post_init__(self):
        if self.hypothesis not in ("H0", "Ha"):
            raise ValueError(
                f"hypothesis must be 'H0' or 'Ha', got {self.hypothesis!r}"
            )
        if self.d < 8:
            raise ValueError(f"need d >= 8, got {self.d}")
        if self.n1 < 3 or self.n2 < 3:
            raise ValueError(f"need n1, n2 >= 3, got ({self.n1}, {self.n2})")


@dataclass(frozen=True)
class SpikedSample:
    x: DataMatrix
    lambda1: float
    h1: np.ndarray
    true_scores: np.ndarray


@dataclass(frozen=True)
class TwoSampleTruth:
    """Population contrasts of sample 2 against sample 1."""

    lambda_ratio: float
    h_inner: float
    kappa_ratio: float


@dataclass(frozen=True)
class TwoSampleDraw:
    x1: DataMatrix
    x2: DataMatrix
    truth: TwoSampleTruth


@lru_cache(maxsize=64)
def spike_eigenvalues(model: str, d: int) -> np.ndarray:
    """Population eigenvalue vector for the given scenario model.

    The returned array is cached and marked read-only.
    """
    if model not in ("a", "b"):
        raise ValueError(f"model must be 'a' or 'b', got {model!r}")
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    index = np.arange(1, d + 1, dtype=np.float64)
    if model == "a":
        values = float(d) ** (1.0 / index)
    else:
        values = float(d) ** (3.0 / (2.0 + 2.0 * index))
    values.flags.writeable = False
    return values


def gen_spiked(scenario: SpikeScenario, rng: np.random.Generator) -> SpikedSample:
    """Draw one d x n data matrix from the spiked model, with truth.

    The innovation matrix has standard normal rows except the last
    ceil(sqrt(d)) rows, which form a scaled t block (df 10, identity
    covariance, one mixing draw per column). Rows are then scaled by
    the square roots of the population eigenvalues. The first row is
    always Gaussian, so the true scores sqrt(lambda1) * z_1j are too.
    """
    d, n = scenario.d, scenario.n
    d_star = math.isqrt(d)
    if d_star * d_star < d:
        d_star += 1
    z_gauss = sample_std_normal(rng, (d - d_star, n))
    z_heavy = sample_scaled_t_vector(rng, d_star, _T_DF, n)
    z = np.vstack((z_gauss, z_heavy))
    lam = spike_eigenvalues(scenario.model, d)
    x = np.sqrt(lam)[:, None] * z
    h1 = np.zeros(d)
    h1[0] = 1.0
    lambda1 = float(lam[0])
    return SpikedSample(
        x=DataMatrix(x),
        lambda1=lambda1,
        h1=h1,
        true_scores=math.sqrt(lambda1) * z[0],
    )


def gen_ar1(
    d: int,
    rho: float,
    scale: float,
    rng: np.random.Generator,
    size: int | None = None,
) -> np.ndarray:
    """AR(1) vector with covariance scale * rho^|s-t| exactly.

    x_1 = sqrt(scale) e_1 and x_t = rho x_{t-1} + sqrt(scale (1-rho^2)) e_t,
    evaluated by a direct-form filter whose per-step arithmetic (one
    multiply, one add) matches the recursion bit for bit. With `size`
    set, returns d x size columns driven by independent innovations.
    """
    d = int(d)
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    rho = float(rho)
    if not -1.0 < rho < 1.0:
        raise ValueError(f"need |rho| < 1, got {rho}")
    scale = float(scale)
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    shape = (d,) if size is None else (d, int(size))
    e = sample_std_normal(rng, shape)
    e[0] *= math.sqrt(scale)
    e[1:] *= math.sqrt(scale * (1.0 - rho * rho))
    return lfilter([1.0], [1.0, -rho], e, axis=0)


def _spike_transforms(
    hypothesis: str, d: int
) -> tuple[np.ndarray, np.ndarray]:
    """Loading matrices B so that the 2x2 spiked block is B @ z.

    Under the null both samples use the same diagonal loadings; under
    the alternative the second sample's block covariance becomes the
    rotation of diag(3 d^(3/4), 1.5 d^(1/2)) by the symmetric orthogonal
    matrix with rows (1/3, sqrt(8)/3) and (sqrt(8)/3, -1/3).
    """
    b1 = np.diag([float(d) ** 0.375, float(d) ** 0.25])
    if hypothesis == "H0":
        return b1, b1
    root8 = math.sqrt(8.0)
    rotation = np.array([[1.0 / 3.0, root8 / 3.0], [root8 / 3.0, -1.0 / 3.0]])
    b2 = rotation @ np.diag(
        [
            math.sqrt(3.0) * float(d) ** 0.375,
            math.sqrt(1.5) * float(d) ** 0.25,
        ]
    )
    return b1, b2


def gen_two_sample(
    scenario: TwoSampleScenario, rng: np.random.Generator
) -> TwoSampleDraw:
    """Draw the two Gaussian samples and report the population truth.

    Draw order is fixed: sample 1 spike block, sample 1 tail, sample 2
    spike block, sample 2 tail. The truth record gives sample 2 relative
    to sample 1: first-eigenvalue ratio, inner product of the leading
    directions, and tail-mass ratio (1, 1, 1 under the null;
    3, 1/3, 1.5 under the alternative).
    """
    d, n1, n2 = scenario.d, scenario.n1, scenario.n2
    b1, b2 = _spike_transforms(scenario.hypothesis, d)
    alt = scenario.hypothesis == "Ha"
    tail_scale = 1.5 if alt else 1.0

    top1 = b1 @ sample_std_normal(rng, (2, n1))
    tail1 = gen_ar1(d - 2, _TAIL_RHO, 1.0, rng, size=n1)
    top2 = b2 @ sample_std_normal(rng, (2, n2))
    tail2 = gen_ar1(d - 2, _TAIL_RHO, tail_scale, rng, size=n2)

    truth = (
        TwoSampleTruth(lambda_ratio=3.0, h_inner=1.0 / 3.0, kappa_ratio=1.5)
        if alt
        else TwoSampleTruth(lambda_ratio=1.0, h_inner=1.0, kappa_ratio=1.0)
    )
    return TwoSampleDraw(
        x1=DataMatrix(np.vstack((top1, tail1))),
        x2=DataMatrix(np.vstack((top2, tail2))),
        truth=truth,
    )


@dataclass(frozen=True)
class EstimationRow:
    """Per-d summary of the single-sample study. Ratios are relative to
    the true first eigenvalue; inner products use the true direction."""

    model: str
    d: int
    n: int
    reps: int
    lambda_tilde_mean: float
    lambda_tilde_var: float
    lambda_tilde_se: float
    lambda_hat_mean: float
    lambda_hat_var: float
    lambda_hat_se: float
    h_tilde_mean: float
    h_tilde_var: float
    h_tilde_se: float
    h_hat_mean: float
    h_hat_var: float
    h_hat_se: float
    mse_tilde_mean: float
    mse_tilde_var: float
    mse_tilde_se: float
    mse_hat_mean: float
    mse_hat_var: float
    mse_hat_se: float

    def as_record(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TestRow:
    """Per-d empirical size and power of the three tests."""

    d: int
    n1: int
    n2: int
    alpha: float
    reps: int
    size_f1: float
    size_f2: float
    size_f3: float
    size_se_f1: float
    size_se_f2: float
    size_se_f3: float
    power_f1: float
    power_f2: float
    power_f3: float
    power_se_f1: float
    power_se_f2: float
    power_se_f3: float

    def as_record(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class McSummary:
    """Ordered per-d rows plus, optionally, the raw per-replication
    values keyed by (d, metric name)."""

    study: str
    seed: Seed
    rows: tuple
    samples: dict | None = None

    def as_records(self) -> list[dict]:
        return [row.as_record() for row in self.rows]


_ESTIMATION_METRICS = (
    "lambda_tilde",
    "lambda_hat",
    "h_tilde",
    "h_hat",
    "mse_tilde",
    "mse_hat",
)


def _estimation_rep(
    model: str, d: int, n: int, seed: Seed, rep: int
) -> tuple[float, ...]:
    rng = make_stream(seed, d, rep, 0)
    draw = gen_spiked(SpikeScenario(model=model, d=d, n=n, seed=seed), rng)
    est = nr_estimate(draw.x).aligned_with(draw.h1)
    lam1 = draw.lambda1
    return (
        float(est.lambda_tilde[0]) / lam1,
        float(est.lambda_hat[0]) / lam1,
        float(est.h_tilde_1 @ draw.h1),
        float(est.h_hat_1 @ draw.h1),
        score_mse(est.scores_tilde, draw.true_scores) / lam1,
        score_mse(est.scores_hat, draw.true_scores) / lam1,
    )


def _estimation_chunk(args: tuple) -> list[tuple[int, tuple[float, ...]]]:
    model, d, n, seed, start, stop = args
    return [
        (rep, _estimation_rep(model, d, n, seed, rep))
        for rep in range(start, stop)
    ]


def _test_rep(
    d: int, n1: int, n2: int, alpha: float, seed: Seed, rep: int, arm: int
) -> tuple[tuple[float, float, float], tuple[bool, bool, bool]]:
    rng = make_stream(seed, d, rep, arm)
    scenario = TwoSampleScenario(
        hypothesis="Ha" if arm else "H0", d=d, n1=n1, n2=n2, seed=seed
    )
    draw = gen_two_sample(scenario, rng)
    est1 = nr_estimate(draw.x1)
    est2 = nr_estimate(draw.x2)
    o1 = test_f1(
        float(est1.lambda_tilde[0]), float(est2.lambda_tilde[0]), n1, n2, alpha
    )
    o2 = test_f2(est1, est2, alpha)
    o3 = test_f3(est1, est2, alpha)
    return (
        (o1.statistic, o2.statistic, o3.statistic),
        (o1.reject_null, o2.reject_null, o3.reject_null),
    )


def _test_chunk(args: tuple) -> list[tuple[int, int, tuple, tuple]]:
    d, n1, n2, alpha, seed, start, stop = args
    out = []
    for rep in range(start, stop):
        for arm in (0, 1):
            stats, rejects = _test_rep(d, n1, n2, alpha, seed, rep, arm)
            out.append((rep, arm, stats, rejects))
    return out


def _chunk_bounds(total: int, pieces: int) -> list[tuple[int, int]]:
    pieces = max(1, min(pieces, total))
    step = -(-total // pieces)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def _run_chunks(chunk_fn, jobs: list[tuple], workers: int) -> list[list]:
    if workers <= 1:
        return [chunk_fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(chunk_fn, jobs))


def _mean_var_se(values: np.ndarray) -> tuple[float, float, float]:
    reps = values.size
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    return mean, var, math.sqrt(var / reps)


def run_estimation_mc(
    model: str,
    d_values: list[int],
    n: int = 10,
    reps: int = 2000,
    seed: Seed = 0,
    workers: int = 1,
    keep_samples: bool = False,
) -> McSummary:
    """Monte Carlo study of both first-eigenvalue estimators.

    Each replication draws a fresh spiked sample from its own substream
    keyed by (seed, d, replication), estimates, aligns signs with the
    true direction, and records eigenvalue ratios, direction inner
    products, and normalized score mean squared errors. Deterministic
    for a fixed seed regardless of `workers`.
    """
    if reps < 2:
        raise ValueError(f"need at least 2 replications, got {reps}")
    d_list = [int(d) for d in d_values]
    if not d_list:
        raise ValueError("d_values must be nonempty")
    seed = int(seed)
    rows = []
    samples: dict = {}
    for d in d_list:
        SpikeScenario(model=model, d=d, n=n, seed=seed)  # validate early
        jobs = [
            (model, d, n, seed, lo, hi)
            for lo, hi in _chunk_bounds(reps, 4 * max(1, workers))
        ]
        slots = np.empty((reps, len(_ESTIMATION_METRICS)))
        for chunk in _run_chunks(_estimation_chunk, jobs, workers):
            for rep, metrics in chunk:
                slots[rep] = metrics
        stats = {
            name: _mean_var_se(slots[:, j])
            for j, name in enumerate(_ESTIMATION_METRICS)
        }
        fields: dict = {"model": model, "d": d, "n": n, "reps": reps}
        for name, (mean, var, se) in stats.items():
            fields[f"{name}_mean"] = mean
            fields[f"{name}_var"] = var
            fields[f"{name}_se"] = se
        rows.append(EstimationRow(**fields))
        if keep_samples:
            for j, name in enumerate(_ESTIMATION_METRICS):
                samples[(d, name)] = slots[:, j].copy()
    return McSummary(
        study="estimation",
        seed=seed,
        rows=tuple(rows),
        samples=samples if keep_samples else None,
    )


def run_test_mc(
    d_values: list[int],
    n1: int = 10,
    n2: int = 20,
    reps: int = 4000,
    alpha: float = 0.05,
    seed: Seed = 0,
    workers: int = 1,
    keep_samples: bool = False,
) -> McSummary:
    """Size and power study of the three equality tests.

    Half the replications draw both samples from the same covariance
    (size), half from the alternative pair (power); the two arms use
    independent substreams keyed by (seed, d, replication, arm).
    Deterministic for a fixed seed regardless of `workers`.
    """
    reps = int(reps)
    if reps < 2 or reps % 2:
        raise ValueError(f"reps must be even and at least 2, got {reps}")
    alpha = float(alpha)
    if not 0.0 <= alpha < 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2), got {alpha}")
    d_list = [int(d) for d in d_values]
    if not d_list:
        raise ValueError("d_values must be nonempty")
    seed = int(seed)
    half = reps // 2
    names = ("f1", "f2", "f3")
    rows = []
    samples: dict = {}
    for d in d_list:
        TwoSampleScenario(hypothesis="H0", d=d, n1=n1, n2=n2, seed=seed)
        jobs = [
            (d, n1, n2, alpha, seed, lo, hi)
            for lo, hi in _chunk_bounds(half, 4 * max(1, workers))
        ]
        stat_slots = np.empty((2, half, 3))
        reject_slots = np.empty((2, half, 3))
        for chunk in _run_chunks(_test_chunk, jobs, workers):
            for rep, arm, stats, rejects in chunk:
                stat_slots[arm, rep] = stats
                reject_slots[arm, rep] = rejects
        fields: dict = {
            "d": d,
            "n1": n1,
            "n2": n2,
            "alpha": alpha,
            "reps": reps,
        }
        for j, name in enumerate(names):
            size = float(np.mean(reject_slots[0, :, j]))
            power = float(np.mean(reject_slots[1, :, j]))
            fields[f"size_{name}"] = size
            fields[f"power_{name}"] = power
            fields[f"size_se_{name}"] = math.sqrt(size * (1.0 - size) / half)
            fields[f"power_se_{name}"] = math.sqrt(
                power * (1.0 - power) / half
            )
        rows.append(TestRow(**fields))
        if keep_samples:
            for j, name in enumerate(names):
                samples[(d, f"{name}_null")] = stat_slots[0, :, j].copy()
                samples[(d, f"{name}_alt")] = stat_slots[1, :, j].copy()
    return McSummary(
        study="tests",
        seed=seed,
        rows=tuple(rows),
        samples=samples if keep_samples else None,
    )
