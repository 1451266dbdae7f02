"""Seeded random streams and the samplers the simulation harness uses.

The generator contract: every stream is a numpy Philox-4x64 counter
generator whose raw 128-bit key is derived from a user seed and a path of
integers (d, replication index, arm, ...) by splitmix64 mixing. A
replication's draws therefore depend only on its own coordinates, never
on scheduling order or worker count, and serial/parallel runs agree
bit for bit.

Normal variates use the Marsaglia polar rejection method on the stream's
uniforms rather than numpy's ziggurat, so the draw sequence is fixed by
this module. Batch sizes inside the rejection loop depend only on how
many draws are still needed, keeping the consumption deterministic.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Seed",
    "splitmix64",
    "derive_key",
    "make_stream",
    "sample_std_normal",
    "sample_chi2",
    "sample_scaled_t_vector",
]

# Seeds are plain 64-bit unsigned integers.
Seed = int

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

# polar method accepts pairs at rate pi/4; ~1.31 pairs yield one normal
_PAIRS_PER_NORMAL = 0.66


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def splitmix64(state: int) -> int:
    """One splitmix64 output step for the 64-bit input state."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(seed: Seed, *path: int) -> int:
    """Mix a seed and an integer path into one 64-bit substream key.

    Identical (seed, path) always gives the identical key; distinct paths
    give keys that collide only with probability ~2^-64.
    """
    key = splitmix64(_check_seed(seed))
    for part in path:
        if not isinstance(part, (int, np.integer)):
            raise TypeError(f"path parts must be integers, got {type(part).__name__}")
        key = splitmix64(key ^ splitmix64(int(part) & _MASK64))
    return key


def make_stream(seed: Seed, *path: int) -> np.random.Generator:
    """Philox-4x64 generator keyed by derive_key(seed, *path).

    The raw key construction bypasses numpy's SeedSequence, so the stream
    is reproducible across numpy versions.
    """
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *path)))


def _polar_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    out = np.empty(count, dtype=np.float64)
    filled = 0
    while filled < count:
        need = count - filled
        pairs = max(int(need * _PAIRS_PER_NORMAL) + 8, 16)
        u = 2.0 * rng.random(pairs) - 1.0
        v = 2.0 * rng.random(pairs) - 1.0
        s = u * u + v * v
        keep = (s > 0.0) & (s < 1.0)
        su, sv, ss = u[keep], v[keep], s[keep]
        factor = np.sqrt(-2.0 * np.log(ss) / ss)
        draws = np.empty(2 * ss.size, dtype=np.float64)
        draws[0::2] = su * factor
        draws[1::2] = sv * factor
        take = min(need, draws.size)
        out[filled : filled + take] = draws[:take]
        filled += take
    return out


def sample_std_normal(rng: np.random.Generator, size=None):
    """Standard normal draws by the polar method.

    Returns a scalar when size is None, a 1-d array for an integer size,
    and an array of that shape for a tuple (filled in row-major order,
    so the stream layout is the flat draw sequence).
    """
    if size is None:
        return float(_polar_normals(rng, 1)[0])
    if isinstance(size, tuple):
        count = 1
        for dim in size:
            count *= int(dim)
        if count < 0:
            raise ValueError(f"size must be nonnegative, got {size}")
        return _polar_normals(rng, count).reshape(size)
    size = int(size)
    if size < 0:
        raise ValueError(f"size must be nonnegative, got {size}")
    return _polar_normals(rng, size)


# sample_chi2 blocks its normal draws so huge requests stay within memory
_CHI2_BLOCK = 4_000_000


def sample_chi2(rng: np.random.Generator, df: int, size: int | None = None):
    """Chi-square draws as sums of df squared standard normals.

    df must be a positive integer (the only case the harness needs);
    moments are exact by construction.
    """
    if not isinstance(df, (int, np.integer)) or isinstance(df, bool):
        raise TypeError(f"df must be a positive integer, got {df!r}")
    df = int(df)
    if df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    scalar = size is None
    count = 1 if scalar else int(size)
    if count < 0:
        raise ValueError(f"size must be nonnegative, got {size}")
    out = np.empty(count, dtype=np.float64)
    block = max(1, _CHI2_BLOCK // df)
    done = 0
    while done < count:
        take = min(block, count - done)
        z = _polar_normals(rng, df * take).reshape(df, take)
        out[done : done + take] = np.einsum("ij,ij->j", z, z)
        done += take
    return float(out[0]) if scalar else out


def sample_scaled_t_vector(
    rng: np.random.Generator, dim: int, df: int, size: int | None = None
):
    """Multivariate t draws scaled to identity covariance.

    Each vector is g * sqrt(df/W) * sqrt((df-2)/df) with g a dim-vector of
    standard normals and one chi-square(df) mixing variable W per vector,
    so the covariance is exactly the identity. Draw order per call: all
    normals first, then the mixing chi-squares.

    Returns shape (dim,) when size is None, else (dim, size).
    """
    dim = int(dim)
    if dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim}")
    if not isinstance(df, (int, np.integer)) or isinstance(df, bool):
        raise TypeError(f"df must be an integer, got {df!r}")
    df = int(df)
    if df < 3:
        raise ValueError(f"df must be >= 3 for a finite covariance, got {df}")
    scalar = size is None
    count = 1 if scalar else int(size)
    if count < 0:
        raise ValueError(f"size must be nonnegative, got {size}")
    g = _polar_normals(rng, dim * count).reshape(dim, count)
    w = sample_chi2(rng, df, count)
    scale = np.sqrt(df / w) * math.sqrt((df - 2.0) / df)
    draws = g * scale[np.newaxis, :]
    return draws[:, 0] if scalar else draws
