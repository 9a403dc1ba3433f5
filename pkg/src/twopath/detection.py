"""Maximum-likelihood detectors for relays and the destination.

All detectors are exhaustive nearest-candidate searches; the constellations
stay small enough (at most M^(2*n_sources) points) that exact search is both
simple and fast. Ties are broken by lowest candidate index, which makes the
zero-noise paths deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import LabeledConstellation


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Winning candidate of an ML search: its index, label, and squared residual."""

    index: int
    label: np.ndarray
    metric: float


def nearest_index(y: complex, candidates: np.ndarray) -> tuple[int, float]:
    """Index of the candidate minimizing |y - c|^2, lowest index on ties."""
    d2 = np.abs(candidates - y) ** 2
    idx = int(np.argmin(d2))
    return idx, float(d2[idx])


def detect_relay_awgn(y: complex, sum_const: LabeledConstellation) -> DetectionResult:
    """Joint ML over precoded pairwise-sum vectors; label is the sum vector."""
    idx, metric = nearest_index(y, sum_const.points)
    return DetectionResult(index=idx, label=sum_const.labels[idx].copy(), metric=metric)


def detect_relay_fading(y: complex, faded_const: LabeledConstellation) -> DetectionResult:
    """Joint ML over (x, x_r) pairs through the current slot's channel.

    The label is the generating pair, shape (2, n_sources); the protocol only
    consumes the component-wise sums label[0] + label[1].
    """
    idx, metric = nearest_index(y, faded_const.points)
    return DetectionResult(index=idx, label=faded_const.pair_labels[idx].copy(), metric=metric)


def detect_destination(
    y: complex, relay_const: LabeledConstellation, h_rd: complex = 1.0 + 0j
) -> DetectionResult:
    """ML detection of the relay-forwarded superposition through h_rd."""
    idx, metric = nearest_index(y, h_rd * relay_const.points)
    return DetectionResult(index=idx, label=relay_const.labels[idx].copy(), metric=metric)


def detect_destination_mrc(
    y1: complex,
    y2: complex,
    h1: complex,
    h2: complex,
    relay_const: LabeledConstellation,
) -> DetectionResult:
    """Joint ML over two independent observations of the same candidate set.

    Equivalent to maximal ratio combining for equal noise densities; used by
    the baseline scheme where both relays forward in the same slot.
    """
    d2 = np.abs(y1 - h1 * relay_const.points) ** 2 + np.abs(y2 - h2 * relay_const.points) ** 2
    idx = int(np.argmin(d2))
    return DetectionResult(index=idx, label=relay_const.labels[idx].copy(), metric=float(d2[idx]))


def nearest_index_batch(y: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Vectorized nearest-candidate search.

    y has shape (F,); candidates is either (P,) shared across rows or (F, P)
    per-row (fading). Returns the argmin index per row, lowest index on ties.
    """
    if candidates.ndim == 1:
        d2 = np.abs(y[:, None] - candidates[None, :])
    else:
        d2 = np.abs(y[:, None] - candidates)
    return np.argmin(d2, axis=1)
