"""Modulation alphabets, complex-field precoding vectors, and labeled constellations.

Every transmitted waveform in the simulator is a superposition Theta^T v scaled
by a single normalization factor so the superposition has unit mean energy.
With that convention the link SNR is exactly 1/N0 and the same constellation
objects feed both the detectors and the analytical bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, InjectivityViolation, UnsupportedSize

# Relative tolerance below which two constellation points count as colliding.
_COLLISION_RTOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    """Finite modulation symbol set (unit-less baseband points)."""

    name: str
    points: tuple[complex, ...]

    @property
    def M(self) -> int:
        return len(self.points)

    def index(self, value: complex) -> int:
        return self.points.index(complex(value))


BPSK = Alphabet("BPSK", (1 + 0j, -1 + 0j))
QPSK = Alphabet("QPSK", (1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j))

_ALPHABETS = {"BPSK": BPSK, "QPSK": QPSK}


def get_alphabet(name: str) -> Alphabet:
    try:
        return _ALPHABETS[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown alphabet {name!r}; expected one of {sorted(_ALPHABETS)}") from None


def enumerate_vectors(values, n: int) -> np.ndarray:
    """All n-tuples over `values` as a (len(values)**n, n) complex array.

    Enumeration order is itertools.product order; every label index in the
    package refers to this ordering.
    """
    return np.array(list(itertools.product(values, repeat=n)), dtype=complex)


def sum_alphabet(alphabet: Alphabet) -> tuple[np.ndarray, np.ndarray]:
    """Values and prior probabilities of x + x_r over independent uniform pairs.

    The pairwise-sum map is many-to-one, so the priors are preimage counts over
    the M^2 ordered pairs. Values are sorted by (real, imag) for a stable order.
    """
    counts: dict[complex, int] = {}
    for a, b in itertools.product(alphabet.points, repeat=2):
        s = complex(a) + complex(b)
        counts[s] = counts.get(s, 0) + 1
    values = sorted(counts, key=lambda v: (v.real, v.imag))
    priors = np.array([counts[v] for v in values], dtype=float) / alphabet.M**2
    return np.array(values, dtype=complex), priors


@dataclass(frozen=True, eq=False)
class PrecodingVector:
    """Per-source complex weights plus the unit-energy normalization scalar.

    norm_scale is chosen so the mean energy of norm_scale * Theta^T x over
    uniform x from the bound alphabet equals 1.
    """

    thetas: np.ndarray
    norm_scale: float
    alphabet: Alphabet
    vandermonde_row: int | None = None

    @property
    def n_sources(self) -> int:
        return len(self.thetas)

    def describe(self) -> dict:
        """Metadata for experiment manifests."""
        return {
            "thetas": [[z.real, z.imag] for z in self.thetas],
            "norm_scale": self.norm_scale,
            "alphabet": self.alphabet.name,
            "vandermonde_row": self.vandermonde_row,
        }


def _min_offdiag_pair(points: np.ndarray) -> tuple[int, int, float]:
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    flat = int(np.argmin(d))
    a, b = divmod(flat, len(points))
    return a, b, float(d[a, b])


def _check_injective(points: np.ndarray, labels: np.ndarray, what: str) -> None:
    a, b, dmin = _min_offdiag_pair(points)
    scale = max(1.0, float(np.max(np.abs(points))))
    if dmin < _COLLISION_RTOL * scale:
        raise InjectivityViolation(
            f"precoder is not injective over {what}: labels {labels[a]} and "
            f"{labels[b]} map to the same point",
            witness_a=labels[a].copy(),
            witness_b=labels[b].copy(),
        )


def _finalize_theta(thetas: np.ndarray, alphabet: Alphabet, row: int | None) -> PrecodingVector:
    n = len(thetas)
    src_labels = enumerate_vectors(alphabet.points, n)
    src_points = src_labels @ thetas
    norm_scale = 1.0 / np.sqrt(float(np.mean(np.abs(src_points) ** 2)))
    _check_injective(src_points, src_labels, "source vectors")
    sum_values, _ = sum_alphabet(alphabet)
    sum_labels = enumerate_vectors(sum_values, n)
    _check_injective(sum_labels @ thetas, sum_labels, "pairwise-sum vectors")
    return PrecodingVector(thetas=thetas, norm_scale=norm_scale, alphabet=alphabet, vandermonde_row=row)


def make_vandermonde_theta(n_sources: int, row: int, alphabet: Alphabet) -> PrecodingVector:
    """Row of the unit-modulus Vandermonde precoding matrix for n_sources.

    Supported sizes are 2^k and 3*2^k; the generator angle differs between the
    two families. Injectivity over both the source vectors and the pairwise
    sums is verified by enumeration before the vector is returned.
    """
    if n_sources < 1:
        raise UnsupportedSize(f"n_sources must be >= 1, got {n_sources}")
    if not 1 <= row <= n_sources:
        raise ValueError(f"row must be in 1..{n_sources}, got {row}")
    odd = n_sources
    while odd % 2 == 0:
        odd //= 2
    if odd == 1:
        delta = np.exp(1j * np.pi * (4 * row - 1) / (2 * n_sources))
    elif odd == 3:
        delta = np.exp(1j * np.pi * (6 * row - 1) / (3 * n_sources))
    else:
        raise UnsupportedSize(
            f"n_sources={n_sources} is neither 2^k nor 3*2^k; no precoder recipe"
        )
    thetas = delta ** np.arange(n_sources)
    return _finalize_theta(thetas, alphabet, row)


def make_custom_theta(values, alphabet: Alphabet) -> PrecodingVector:
    """Wrap user-supplied precoding weights, normalizing and checking injectivity."""
    thetas = np.asarray(values, dtype=complex)
    if thetas.ndim != 1 or len(thetas) == 0:
        raise ValueError("theta must be a non-empty 1-D sequence of complex weights")
    return _finalize_theta(thetas, alphabet, None)


@dataclass(eq=False)
class LabeledConstellation:
    """Finite point set with generating-vector labels, priors, and distances.

    labels holds the vector the zero-norm error partition is taken over
    (source vectors x, pairwise sums z, or faded sums). pair_labels is only
    present for joint (x, x_r) constellations and carries the generating pair.
    """

    points: np.ndarray
    labels: np.ndarray
    priors: np.ndarray
    pair_labels: np.ndarray | None = None

    def __post_init__(self):
        if abs(float(self.priors.sum()) - 1.0) > 1e-12:
            raise ConfigError("constellation priors must sum to 1")
        if np.any(self.priors < 0):
            raise ConfigError("constellation priors must be non-negative")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_sources(self) -> int:
        return self.labels.shape[1]

    @cached_property
    def dist(self) -> np.ndarray:
        """Dense Euclidean distance matrix between points."""
        return np.abs(self.points[:, None] - self.points[None, :])

    @cached_property
    def min_distance(self) -> float:
        _, _, dmin = _min_offdiag_pair(self.points)
        return dmin

    @cached_property
    def _label_lookup(self) -> dict:
        return {tuple(row): i for i, row in enumerate(self.labels)}

    def index_of_label(self, vec) -> int:
        """Index of an exact label vector (valid for integer-valued labels)."""
        key = tuple(complex(v) for v in np.asarray(vec).ravel())
        try:
            return self._label_lookup[key]
        except KeyError:
            raise KeyError(f"label {vec} not in constellation") from None

    def zero_norm_matrix(self, tol: float = 1e-9) -> np.ndarray:
        """Pairwise count of differing label components (the zero-norm of a-b).

        Row-chunked so large joint constellations stay within memory.
        """
        n = len(self.labels)
        out = np.empty((n, n), dtype=np.int16)
        chunk = max(1, int(4e6) // max(n, 1))
        for lo in range(0, n, chunk):
            hi = min(n, lo + chunk)
            diff = np.abs(self.labels[lo:hi, None, :] - self.labels[None, :, :]) > tol
            out[lo:hi] = diff.sum(axis=2)
        return out


def build_source_constellation(theta: PrecodingVector, alphabet: Alphabet) -> LabeledConstellation:
    """Constellation of the precoded source superposition, uniform priors."""
    labels = enumerate_vectors(alphabet.points, theta.n_sources)
    points = theta.norm_scale * (labels @ theta.thetas)
    priors = np.full(len(labels), 1.0 / len(labels))
    return LabeledConstellation(points=points, labels=labels, priors=priors)


def build_sum_constellation(theta: PrecodingVector, alphabet: Alphabet) -> LabeledConstellation:
    """Constellation seen by a relay: precoded sums x + x_r with preimage priors.

    Component sums are independent across sources, so the prior of a sum
    vector is the product of per-component preimage-count priors; this equals
    exact preimage counting over all (x, x_r) pairs divided by M^(2n).
    """
    values, value_priors = sum_alphabet(alphabet)
    prior_of = dict(zip(values.tolist(), value_priors))
    labels = enumerate_vectors(values, theta.n_sources)
    points = theta.norm_scale * (labels @ theta.thetas)
    priors = np.array([np.prod([prior_of[v] for v in row]) for row in labels.tolist()])
    return LabeledConstellation(points=points, labels=labels, priors=priors)


def build_faded_sum_constellation(
    theta: PrecodingVector,
    alphabet: Alphabet,
    h_sr,
    h12: complex,
) -> LabeledConstellation:
    """Joint (x, x_r) constellation through per-source fading and relay leakage.

    Points are norm_scale * Theta^T (h_sr * x + h12 * x_r) over every ordered
    pair. Exactly coincident points (e.g. the all-ones channel, where the pair
    map collapses onto the plain sums, or h12 = 0, where x_r drops out) are
    merged and their priors accumulated; near-coincident points are kept
    separate and left to the detector's deterministic tie-break.
    """
    h_sr = np.asarray(h_sr, dtype=complex)
    n = theta.n_sources
    if h_sr.shape != (n,):
        raise ConfigError(f"h_sr must have shape ({n},), got {h_sr.shape}")
    base = enumerate_vectors(alphabet.points, n)
    m = len(base)
    # ordered pairs in (x-major, x_r-minor) enumeration order
    x = np.repeat(base, m, axis=0)
    x_r = np.tile(base, (m, 1))
    faded = h_sr[None, :] * x + complex(h12) * x_r
    points = theta.norm_scale * (faded @ theta.thetas)

    pts_list = points.tolist()
    keep: list[int] = []
    weight: dict[complex, int] = {}
    for i, p in enumerate(pts_list):
        if p in weight:
            weight[p] += 1
        else:
            weight[p] = 1
            keep.append(i)
    idx = np.array(keep, dtype=int)
    priors = np.array([weight[pts_list[i]] for i in keep], dtype=float) / (m * m)
    pair_labels = np.stack([x[idx], x_r[idx]], axis=1)
    return LabeledConstellation(
        points=points[idx], labels=faded[idx], priors=priors, pair_labels=pair_labels
    )
