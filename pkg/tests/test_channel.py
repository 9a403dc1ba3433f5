"""Channel realizations, noise statistics, and the link-budget helper."""

import numpy as np
import pytest
from scipy import stats

from twopath import (
    ConfigError,
    NonPositiveDistance,
    add_noise,
    awgn_profile,
    crandn,
    pathloss_db,
    rayleigh_profile,
    sample_realization,
    sample_realizations,
    snr_db_to_n0,
    snr_from_pathloss,
)


def test_awgn_realization_is_all_ones():
    prof = awgn_profile(2, 0.1)
    r = sample_realization(prof, np.random.default_rng(0), slot=3)
    assert np.all(r.h_sr == 1.0)
    assert r.h_12 == 1.0
    assert np.all(r.h_rd == 1.0)
    assert r.slot_index == 3


def test_awgn_consumes_no_randomness():
    prof = awgn_profile(2, 0.1)
    rng = np.random.default_rng(7)
    sample_realizations(prof, rng, 10)
    # the stream is untouched, so the next draw matches a fresh generator
    assert rng.standard_normal() == np.random.default_rng(7).standard_normal()


def test_rayleigh_mean_power():
    prof = rayleigh_profile(2, 0.1)
    rng = np.random.default_rng(1)
    h_sr, h12, h_rd = sample_realizations(prof, rng, 125_000)
    for h in (h_sr.ravel(), h12, h_rd.ravel()):
        assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 0.01


def test_rayleigh_magnitude_cdf():
    # |h| for E|h|^2 = sigma2 follows the Rayleigh law with scale sqrt(sigma2/2)
    prof = rayleigh_profile(1, 0.1, sigma2_sr=np.full((1, 2), 2.0))
    rng = np.random.default_rng(2)
    h_sr, _, _ = sample_realizations(prof, rng, 500_000)
    mags = np.abs(h_sr).ravel()
    stat, _ = stats.kstest(mags, "rayleigh", args=(0, 1.0))  # scale sqrt(2/2) = 1
    assert stat < 0.01


def test_rayleigh_varies_across_slots():
    prof = rayleigh_profile(2, 0.1)
    rng = np.random.default_rng(3)
    h_sr, _, _ = sample_realizations(prof, rng, 2)
    assert not np.allclose(h_sr[0], h_sr[1])


def test_rayleigh_deterministic_for_equal_seeds():
    prof = rayleigh_profile(2, 0.1)
    a = sample_realizations(prof, np.random.default_rng(42), 5)
    b = sample_realizations(prof, np.random.default_rng(42), 5)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_add_noise_zero_is_identity():
    y = add_noise(0.3 - 0.7j, 0.0, np.random.default_rng(0))
    assert y == 0.3 - 0.7j


def test_add_noise_variance():
    rng = np.random.default_rng(4)
    w = add_noise(np.zeros(1_000_000), 2.0, rng)
    assert abs(np.var(w.real) - 1.0) < 0.01
    assert abs(np.mean(np.abs(w) ** 2) - 2.0) < 0.02


def test_noise_is_white():
    rng = np.random.default_rng(5)
    w = crandn(rng, 1_000_000)
    x = w.real
    x = (x - x.mean()) / x.std()
    for lag in (1, 2, 5):
        acf = np.mean(x[:-lag] * x[lag:])
        assert abs(acf) < 0.01


def test_add_noise_rejects_negative_n0():
    with pytest.raises(ConfigError):
        add_noise(0j, -1.0, np.random.default_rng(0))


@pytest.mark.parametrize("d, expected", [(1.0, 15.3), (10.0, 52.9), (100.0, 90.5)])
def test_pathloss_values(d, expected):
    assert abs(pathloss_db(d) - expected) < 1e-9


def test_pathloss_rejects_nonpositive_distance():
    with pytest.raises(NonPositiveDistance):
        pathloss_db(0.0)
    with pytest.raises(NonPositiveDistance):
        snr_from_pathloss(-1.0, 20.0)


def test_snr_from_pathloss_linear_scale():
    # tx 20 dBm, d=10 -> PL 52.9 dB, noise -174 dBm/Hz over 1 Hz
    snr = snr_from_pathloss(10.0, 20.0, -174.0, 1.0)
    assert abs(10 * np.log10(snr) - (20.0 - 52.9 + 174.0)) < 1e-9


def test_snr_db_to_n0():
    assert abs(snr_db_to_n0(0.0) - 1.0) < 1e-15
    assert abs(snr_db_to_n0(10.0) - 0.1) < 1e-15
    assert abs(snr_db_to_n0(-5.0) - 10 ** 0.5) < 1e-12


def test_profile_validation():
    with pytest.raises(ConfigError):
        rayleigh_profile(2, 0.1, sigma2_sr=np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        awgn_profile(2, -0.1)
