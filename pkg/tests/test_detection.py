"""ML detector behavior: exactness, tie-breaks, invariances, MRC."""

import numpy as np
import pytest

from twopath import (
    BPSK,
    QPSK,
    build_faded_sum_constellation,
    build_source_constellation,
    build_sum_constellation,
    detect_destination,
    detect_destination_mrc,
    detect_relay_awgn,
    detect_relay_fading,
    make_vandermonde_theta,
)
from twopath.detection import nearest_index


@pytest.fixture
def theta2():
    return make_vandermonde_theta(2, 1, BPSK)


def _oracle_nearest(y, points):
    # independent brute-force: plain python min over squared distances
    best, best_d = 0, abs(points[0] - y) ** 2
    for i in range(1, len(points)):
        d = abs(points[i] - y) ** 2
        if d < best_d:
            best, best_d = i, d
    return best


def test_zero_noise_exactness_all_constellations(theta2):
    consts = [
        build_source_constellation(theta2, BPSK),
        build_sum_constellation(theta2, BPSK),
    ]
    for const in consts:
        for i, p in enumerate(const.points):
            res = detect_relay_awgn(complex(p), const)
            assert res.index == i
            assert res.metric < 1e-20


def test_relay_detects_table_fixture_sums(theta2):
    # sources (1,1) with interference (1,-1) superpose to the sum vector (2,0)
    const = build_sum_constellation(theta2, BPSK)
    c, th = theta2.norm_scale, theta2.thetas
    y = c * (np.array([2.0, 0.0]) @ th)
    res = detect_relay_awgn(complex(y), const)
    np.testing.assert_allclose(res.label, [2.0, 0.0])


def test_nearest_matches_bruteforce_oracle(theta2):
    const = build_sum_constellation(theta2, BPSK)
    rng = np.random.default_rng(8)
    for _ in range(500):
        y = complex(*rng.standard_normal(2) * 1.5)
        idx, _ = nearest_index(y, const.points)
        assert idx == _oracle_nearest(y, const.points.tolist())


def test_midpoint_perturbation(theta2):
    const = build_source_constellation(theta2, BPSK)
    d = const.dist + np.where(np.eye(len(const)), np.inf, 0)
    a, b = np.unravel_index(np.argmin(d), d.shape)
    mid = (const.points[a] + const.points[b]) / 2
    eps = 1e-6 * (const.points[b] - mid)
    res = detect_relay_awgn(complex(mid + eps), const)
    assert res.index == b


def test_tie_breaks_to_lowest_index(theta2):
    const = build_source_constellation(theta2, BPSK)
    d = const.dist + np.where(np.eye(len(const)), np.inf, 0)
    a, b = np.unravel_index(np.argmin(d), d.shape)
    mid = (const.points[a] + const.points[b]) / 2
    res = detect_relay_awgn(complex(mid), const)
    assert res.index == min(a, b)


def test_scaling_invariance(theta2):
    const = build_source_constellation(theta2, BPSK)
    rng = np.random.default_rng(9)
    for _ in range(100):
        y = complex(*rng.standard_normal(2))
        i1, _ = nearest_index(y, const.points)
        i2, _ = nearest_index(2 * y, 2 * const.points)
        assert i1 == i2


def test_detect_destination_with_channel(theta2):
    const = build_source_constellation(theta2, BPSK)
    h = 0.5 * np.exp(1j * np.pi / 3)
    for i, p in enumerate(const.points):
        res = detect_destination(complex(h * p), const, h)
        assert res.index == i


def test_detect_relay_fading_zero_noise(theta2):
    rng = np.random.default_rng(10)
    h = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) / np.sqrt(2)
    h12 = complex(rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
    faded = build_faded_sum_constellation(theta2, BPSK, h, h12)
    assert len(faded) == 16  # no collisions for a generic draw
    for i, p in enumerate(faded.points):
        res = detect_relay_fading(complex(p), faded)
        np.testing.assert_array_equal(res.label, faded.pair_labels[i])


def test_detect_relay_fading_all_ones_matches_awgn_sums(theta2):
    faded = build_faded_sum_constellation(theta2, BPSK, np.ones(2), 1.0)
    plain = build_sum_constellation(theta2, BPSK)
    for p in plain.points:
        res_f = detect_relay_fading(complex(p), faded)
        res_a = detect_relay_awgn(complex(p), plain)
        sums = res_f.label[0] + res_f.label[1]
        np.testing.assert_allclose(sums, res_a.label, atol=1e-12)


def test_mrc_zero_noise(theta2):
    const = build_source_constellation(theta2, BPSK)
    for i, p in enumerate(const.points):
        res = detect_destination_mrc(complex(p), complex(p), 1.0, 1.0, const)
        assert res.index == i


def test_mrc_degenerate_branch_reduces_to_single(theta2):
    const = build_source_constellation(theta2, BPSK)
    rng = np.random.default_rng(12)
    for _ in range(200):
        y1 = complex(*rng.standard_normal(2))
        y2 = complex(*rng.standard_normal(2))
        res_mrc = detect_destination_mrc(y1, y2, 1.0, 0.0, const)
        res_one = detect_destination(y1, const, 1.0)
        assert res_mrc.index == res_one.index


def _sep_single_branch(const, n0, trials, seed):
    rng = np.random.default_rng(seed)
    tx = rng.integers(0, len(const), size=trials)
    noise = (rng.standard_normal(trials) + 1j * rng.standard_normal(trials)) * np.sqrt(n0 / 2)
    y = const.points[tx] + noise
    d = np.abs(y[:, None] - const.points[None, :])
    return np.mean(np.argmin(d, axis=1) != tx)


def _sep_mrc(const, n0, trials, seed):
    rng = np.random.default_rng(seed)
    tx = rng.integers(0, len(const), size=trials)
    w = (rng.standard_normal((trials, 2, 2)) @ [1, 1j]) * np.sqrt(n0 / 2)
    y1 = const.points[tx] + w[:, 0]
    y2 = const.points[tx] + w[:, 1]
    d = (
        np.abs(y1[:, None] - const.points[None, :]) ** 2
        + np.abs(y2[:, None] - const.points[None, :]) ** 2
    )
    return np.mean(np.argmin(d, axis=1) != tx)


def test_mrc_equals_double_snr_single_branch(theta2):
    # combining two equal-SNR branches of the same symbol equals one branch
    # at twice the SNR (half the noise density)
    const = build_source_constellation(theta2, BPSK)
    n0 = 0.5
    trials = 60_000
    sep_mrc = _sep_mrc(const, n0, trials, seed=100)
    sep_2x = _sep_single_branch(const, n0 / 2, trials, seed=200)
    se = np.sqrt(max(sep_mrc, 1e-9) / trials) * 3 + np.sqrt(max(sep_2x, 1e-9) / trials) * 3
    assert abs(sep_mrc - sep_2x) < se + 0.003


def test_sep_monotone_in_snr(theta2):
    const = build_source_constellation(theta2, BPSK)
    seps = [_sep_single_branch(const, 10 ** (-s / 10), 40_000, seed=7) for s in (0, 6, 12)]
    assert seps[0] > seps[1] > seps[2]
