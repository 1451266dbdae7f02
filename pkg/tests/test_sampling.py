"""Stream derivation and sampler distribution checks.

The splitmix64 vectors are frozen from an independent straight-line
transcription of the published algorithm. Moment bands are several
standard errors wide for the pinned draw counts, so they are stable
for any fixed stream.
"""

import numpy as np
import pytest

from nrpca.sampling import (
    derive_key,
    make_stream,
    sample_chi2,
    sample_scaled_t_vector,
    sample_std_normal,
    splitmix64,
)

SPLITMIX_VECTORS = [
    (0, 16294208416658607535),
    (1, 10451216379200822465),
    (0x123456789ABCDEF, 1547611027431991965),
    (2**64 - 1, 16490336266968443936),
]


@pytest.mark.parametrize("state,expected", SPLITMIX_VECTORS)
def test_splitmix64_frozen(state, expected):
    assert splitmix64(state) == expected


def test_derive_key_is_path_sensitive():
    keys = {
        derive_key(7),
        derive_key(7, 0),
        derive_key(7, 1),
        derive_key(7, 0, 0),
        derive_key(7, 0, 1),
        derive_key(7, 1, 0),
        derive_key(8),
        derive_key(8, 0, 1),
    }
    assert len(keys) == 8
    assert derive_key(7, 2048, 13, 1) == derive_key(7, 2048, 13, 1)


def test_make_stream_reproducible():
    a = sample_std_normal(make_stream(42, 5, 0), 1000)
    b = sample_std_normal(make_stream(42, 5, 0), 1000)
    c = sample_std_normal(make_stream(42, 5, 1), 1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_normal_moments():
    draws = sample_std_normal(make_stream(314), 1_000_000)
    assert abs(draws.mean()) <= 0.004
    assert abs(draws.var(ddof=1) - 1.0) <= 0.01


def test_normal_scalar_and_shape_modes():
    rng = make_stream(9)
    single = sample_std_normal(rng)
    assert isinstance(single, float)
    arr = sample_std_normal(rng, 7)
    assert arr.shape == (7,)
    grid = sample_std_normal(rng, (3, 4))
    assert grid.shape == (3, 4)


def test_normal_tuple_shape_is_row_major_flat():
    a = sample_std_normal(make_stream(77), (3, 4))
    b = sample_std_normal(make_stream(77), 12).reshape(3, 4)
    assert np.array_equal(a, b)


def test_chi2_rejects_non_integer_df():
    rng = make_stream(1)
    with pytest.raises(TypeError):
        sample_chi2(rng, 2.5, 4)
    with pytest.raises(TypeError):
        sample_chi2(rng, True, 4)
    with pytest.raises(ValueError):
        sample_chi2(rng, 0, 4)


def test_chi2_moments():
    draws = sample_chi2(make_stream(271), 3, 200_000)
    assert abs(draws.mean() - 3.0) <= 0.1
    assert abs(draws.var(ddof=1) - 6.0) <= 0.5
    assert draws.min() >= 0.0


def test_chi2_df1_matches_squared_normals():
    # df=1 is literally the square of the stream's normal draws
    squares = sample_chi2(make_stream(55), 1, 1000)
    normals = sample_std_normal(make_stream(55), 1000)
    assert np.array_equal(squares, normals**2)


def test_scaled_t_identity_covariance():
    draws = sample_scaled_t_vector(make_stream(628), 2, 10, 100_000)
    assert draws.shape == (2, 100_000)
    emp = draws @ draws.T / 100_000
    assert np.all(np.abs(emp - np.eye(2)) <= 0.02)


def test_scaled_t_heavier_tails_than_normal():
    draws = sample_scaled_t_vector(make_stream(99), 2, 10, 100_000)
    # a standard normal exceeds 4.5 in absolute value about 1.4 times
    # per 200k draws; the scaled t with df 10 does so tens of times
    assert np.sum(np.abs(draws) > 4.5) > 20


def test_scaled_t_shares_mixing_draw_within_column():
    draws = sample_scaled_t_vector(make_stream(123), 2, 10, 200_000)
    sq = draws**2
    corr = np.corrcoef(sq[0], sq[1])[0, 1]
    assert corr > 0.03  # population value 1/9 for df 10


def test_scaled_t_requires_df_at_least_3():
    rng = make_stream(5)
    with pytest.raises(ValueError):
        sample_scaled_t_vector(rng, 2, 2, 4)


def test_scaled_t_single_vector_shape():
    vec = sample_scaled_t_vector(make_stream(6), 3, 10)
    assert vec.shape == (3,)
