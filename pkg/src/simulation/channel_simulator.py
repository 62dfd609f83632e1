"""
LSCM Toolkit - Channel Simulator

Physics-level synthetic data: sparse ground-truth angular power vectors,
log-normal path gains, per-antenna channel responses and per-beam RSRP samples.

The channel of element (x, y) at time t is

    h_{x,y}(t) = sum_paths sqrt(alpha_p(t)) g_p exp(-1j geo_p(x, y)) exp(-1j (omega_p(t) + omega_{x,y}(t)))

with omega_p ~ Uniform(-pi, pi) per path and omega_{x,y} ~ Normal(0, sigma^2)
per antenna, and the RSRP of beam m is P |sum_{x,y} h_{x,y}(t) w^{(m)}_{x,y}|^2.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger

from src.array.codebook import BeamCodebook
from src.array.gain_pattern import GainPattern
from src.array.geometry import ArrayConfig, AngularGrid, check_index, geometric_phase
from src.errors import DimensionError
from src.evaluation.metrics import to_db
from src.simulation.random_streams import chunk_bounds, stream

TRACE_COLUMNS = ["t", "beam", "rsrp_linear", "rsrp_db"]


@dataclass(frozen=True)
class GroundTruthAps:
    """
    Sparse expected channel gains X = E[alpha] in flattened cell order.

    Attributes:
        x: Non-negative vector of length N.
        support: Sorted indices with x > 0.
    """

    x: np.ndarray
    support: Tuple[int, ...]

    @classmethod
    def from_vector(cls, x) -> "GroundTruthAps":
        x = np.array(x, dtype=float)
        if x.ndim != 1:
            raise DimensionError(f"ground truth must be a vector, got shape {x.shape}")
        if np.any(x < 0) or np.any(~np.isfinite(x)):
            raise ValueError("ground truth entries must be finite and non-negative")
        x.setflags(write=False)
        return cls(x, tuple(int(n) for n in np.flatnonzero(x > 0)))

    @property
    def k(self) -> int:
        """Number of paths |support|."""
        return len(self.support)


@dataclass(frozen=True)
class ShadowingParams:
    """Log-normal shadowing: std of the underlying normal, natural-log scale."""

    log_std: float = 0.0

    def __post_init__(self):
        if not self.log_std >= 0:
            raise ValueError(f"log_std must be non-negative, got {self.log_std}")


@dataclass(frozen=True)
class ValueDistribution:
    """
    Distribution of the non-zero ground-truth powers.

    kind is one of ``log_uniform`` (uniform in dB over ``dynamic_range_db``
    below ``peak``), ``uniform`` (over [low, high]) or ``constant`` (``peak``).
    """

    kind: str = "log_uniform"
    dynamic_range_db: float = 20.0
    peak: float = 1.0
    low: float = 0.1
    high: float = 1.0

    def __post_init__(self):
        if self.kind not in ("log_uniform", "uniform", "constant"):
            raise ValueError(f"unknown value distribution: {self.kind}")
        if self.peak <= 0 or self.dynamic_range_db < 0:
            raise ValueError("peak must be positive and dynamic range non-negative")
        if self.kind == "uniform" and not 0 < self.low <= self.high:
            raise ValueError("uniform distribution needs 0 < low <= high")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "log_uniform":
            return self.peak * 10.0 ** (-rng.uniform(0.0, 1.0, size) * self.dynamic_range_db / 10.0)
        if self.kind == "uniform":
            return rng.uniform(self.low, self.high, size)
        return np.full(size, self.peak)


@dataclass(frozen=True)
class RsrpSampleSet:
    """
    Raw RSRP samples of T time instants for M beams, linear power.

    Attributes:
        samples: Array of shape (T, M).
        beam_labels: Name of every column.
    """

    samples: np.ndarray
    beam_labels: Tuple[str, ...]

    @property
    def t_count(self) -> int:
        return self.samples.shape[0]

    @property
    def mean(self) -> np.ndarray:
        """Per-beam sample average, the empirical estimate of y."""
        return self.samples.mean(axis=0)

    @property
    def std_error(self) -> np.ndarray:
        """Standard error of each beam mean (NaN for a single sample)."""
        if self.t_count < 2:
            return np.full(self.samples.shape[1], np.nan)
        return self.samples.std(axis=0, ddof=1) / np.sqrt(self.t_count)


def _as_generator(rng_seed: Union[int, np.random.Generator]) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return stream(int(rng_seed))


def generate_ground_truth(
    n: int,
    k: int,
    rng_seed: Union[int, np.random.Generator],
    value_dist: Optional[ValueDistribution] = None,
    candidates: Optional[Sequence[int]] = None,
) -> GroundTruthAps:
    """
    Draw a k-sparse non-negative vector of length n.

    Support positions are uniform without replacement over ``candidates``
    (all of 0..n-1 by default); values follow ``value_dist``.

    Raises:
        ValueError: If k is not in [1, number of candidates].
    """
    rng = _as_generator(rng_seed)
    value_dist = value_dist or ValueDistribution()
    pool = np.arange(n) if candidates is None else np.asarray(candidates, dtype=int)
    if k < 1:
        raise ValueError(f"sparsity must be at least 1, got {k}")
    if k > pool.size:
        raise ValueError(f"sparsity {k} exceeds the {pool.size} available cells")

    support = rng.choice(pool, size=k, replace=False)
    x = np.zeros(n)
    x[support] = value_dist.draw(rng, k)
    return GroundTruthAps.from_vector(x)


def sample_channel_gain(mean: float, shadow: ShadowingParams, rng: np.random.Generator) -> float:
    """
    One log-normal channel gain with E[alpha] = mean.

    alpha = exp(mu + s z) with mu = ln(mean) - s^2 / 2.
    """
    if not mean > 0:
        raise ValueError(f"mean channel gain must be positive, got {mean}")
    z = rng.standard_normal()
    if shadow.log_std == 0:
        return float(mean)
    s = shadow.log_std
    return float(np.exp(np.log(mean) - 0.5 * s * s + s * z))


def _path_phasors(cfg: ArrayConfig, grid: AngularGrid, codebook: BeamCodebook, support: Sequence[int], m: int) -> np.ndarray:
    """exp(-1j psi) for every (path, antenna) under beam m, shape (P, N_T)."""
    tilts, azimuths = grid.flat_angles()
    support = np.asarray(support, dtype=int)
    psi = geometric_phase(cfg, tilts[support], azimuths[support]) - codebook.phases[m].ravel()
    return np.exp(-1j * psi)


def _draw_beam_samples(
    cfg: ArrayConfig,
    phasors: np.ndarray,
    gains: np.ndarray,
    means: np.ndarray,
    shadow: ShadowingParams,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    n_paths = means.size
    # Draw order: path gains, path phases, antenna phases.
    z = rng.standard_normal((count, n_paths))
    path_phase = rng.uniform(-np.pi, np.pi, (count, n_paths))
    antenna_phase = rng.standard_normal((count, cfg.n_antennas)) * cfg.sigma

    s = shadow.log_std
    if s == 0:
        alpha = np.broadcast_to(means, (count, n_paths))
    else:
        alpha = np.exp(np.log(means) - 0.5 * s * s + s * z)

    array_sums = np.exp(-1j * antenna_phase) @ phasors.T
    field = np.sum(np.sqrt(alpha) * gains * np.exp(-1j * path_phase) * array_sums, axis=1)
    return cfg.power * np.abs(field) ** 2


def _check_scenario(cfg, grid, pattern, codebook, truth):
    codebook.check_array(cfg)
    pattern.check_grid(grid)
    if truth.x.size != grid.size:
        raise DimensionError(f"ground truth has {truth.x.size} entries for {grid.size} cells")


def sample_rsrp(
    cfg: ArrayConfig,
    grid: AngularGrid,
    pattern: GainPattern,
    codebook: BeamCodebook,
    truth: GroundTruthAps,
    shadow: ShadowingParams,
    rng: np.random.Generator,
    m: int,
) -> float:
    """
    One raw RSRP sample of beam m.

    Returns 0.0 when the ground truth has no paths.
    """
    _check_scenario(cfg, grid, pattern, codebook, truth)
    check_index(m, codebook.size, "beam index")
    if truth.k == 0:
        logger.warning("Ground truth has an empty support; RSRP is identically zero")
        return 0.0
    support = list(truth.support)
    phasors = _path_phasors(cfg, grid, codebook, support, m)
    samples = _draw_beam_samples(cfg, phasors, pattern.flat()[support], truth.x[support], shadow, rng, 1)
    return float(samples[0])


def estimate_expected_rsrp(
    cfg: ArrayConfig,
    grid: AngularGrid,
    pattern: GainPattern,
    codebook: BeamCodebook,
    truth: GroundTruthAps,
    shadow: ShadowingParams,
    seed: int,
    t_count: int,
    chunk_size: int = 8192,
    n_jobs: int = 1,
    stream_key: Sequence[int] = (),
) -> RsrpSampleSet:
    """
    Monte Carlo estimate of the expected RSRP of every beam.

    Beam m draws its samples chunk by chunk from
    ``stream(seed, *stream_key, m, chunk)``, so the result does not depend on
    ``n_jobs``.

    Args:
        cfg, grid, pattern, codebook: Scenario.
        truth: Ground-truth expected path gains.
        shadow: Shadowing parameters.
        seed: Root seed.
        t_count: Samples per beam (T >= 1).
        chunk_size: Samples drawn per stream.
        n_jobs: Parallel workers over (beam, chunk) pairs.
        stream_key: Counters that separate independent simulations under one seed.

    Returns:
        RsrpSampleSet: Samples of shape (T, M).
    """
    if t_count < 1:
        raise ValueError(f"t_count must be at least 1, got {t_count}")
    _check_scenario(cfg, grid, pattern, codebook, truth)
    if truth.k == 0:
        logger.warning("Ground truth has an empty support; RSRP is identically zero")
        return RsrpSampleSet(np.zeros((t_count, codebook.size)), codebook.labels)

    support = list(truth.support)
    gains = pattern.flat()[support]
    means = truth.x[support]
    phasors = [_path_phasors(cfg, grid, codebook, support, m) for m in range(codebook.size)]
    tasks = [(m, chunk, start, stop) for m in range(codebook.size) for chunk, start, stop in chunk_bounds(t_count, chunk_size)]

    def run(m, chunk, start, stop):
        return _draw_beam_samples(cfg, phasors[m], gains, means, shadow, stream(seed, *stream_key, m, chunk), stop - start)

    if n_jobs == 1:
        blocks = [run(*task) for task in tasks]
    else:
        blocks = Parallel(n_jobs=n_jobs)(delayed(run)(*task) for task in tasks)

    samples = np.empty((t_count, codebook.size))
    for (m, _, start, stop), block in zip(tasks, blocks):
        samples[start:stop, m] = block
    logger.debug(f"Drew {t_count} RSRP samples for {codebook.size} beams over {truth.k} paths")
    return RsrpSampleSet(samples, codebook.labels)


def export_trace(sample_set: RsrpSampleSet, path) -> Path:
    """Write samples as ``t,beam,rsrp_linear,rsrp_db`` rows, ordered by t then beam."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    t_count, n_beams = sample_set.samples.shape
    linear = sample_set.samples.ravel()
    df = pd.DataFrame({
        "t": np.repeat(np.arange(t_count), n_beams),
        "beam": np.tile(np.asarray(sample_set.beam_labels), t_count),
        "rsrp_linear": linear,
        "rsrp_db": to_db(linear),
    })
    df.to_csv(path, index=False, float_format="%.17g")
    return path
