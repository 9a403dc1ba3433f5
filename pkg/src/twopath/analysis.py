"""Closed-form and sampled evaluation of the SEP and throughput lower bounds.

All link error probabilities are pairwise union bounds over labeled
constellations, partitioned by how many source positions an error corrupts
(the zero-norm of the label difference). Throughput bounds assemble the link
bounds with the lucky-recovery terms in which errors on consecutive hops
cancel through the network-coding demap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .channel import FadingProfile, RAYLEIGH, crandn
from .constellation import (
    Alphabet,
    LabeledConstellation,
    PrecodingVector,
    build_faded_sum_constellation,
    build_source_constellation,
    build_sum_constellation,
)
from .errors import ConfigError, InsufficientSamples
from .pnc import PncMapper, get_mapper

RAYLEIGH_SAMPLE_FLOOR = 10_000


def q_function(x):
    """Gaussian tail probability P{N(0,1) > x}."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def _q_pairwise(const: LabeledConstellation, n0: float) -> np.ndarray:
    """Matrix of pairwise error terms Q(d_ab / sqrt(2 N0))."""
    if n0 <= 0:
        out = np.zeros_like(const.dist)
        return out
    return q_function(const.dist / np.sqrt(2.0 * n0))


def _clamp(p: float) -> float:
    return float(min(max(p, 0.0), 1.0))


def pe_k(const: LabeledConstellation, n0: float, k: int) -> float:
    """Prior-weighted union bound on errors corrupting exactly k source positions.

    Sums Q(d_ab / sqrt(2 N0)) over ordered pairs whose labels differ in
    exactly k components, weighting each row by its prior. Uniform priors give
    the plain per-point average.
    """
    if not 1 <= k <= const.n_sources:
        raise ConfigError(f"k must be in 1..{const.n_sources}, got {k}")
    q = _q_pairwise(const, n0)
    mask = const.zero_norm_matrix() == k
    return float(const.priors @ (q * mask).sum(axis=1))


def _mean_corrupted_fraction(const: LabeledConstellation, n0: float, pairwise=None) -> float:
    """(1/n) sum_k k * pe_k, evaluated in one pass via the zero-norm weights."""
    q = _q_pairwise(const, n0) if pairwise is None else pairwise
    zn = const.zero_norm_matrix()
    return float(const.priors @ (q * zn).sum(axis=1)) / const.n_sources


def pe_rd(const_s: LabeledConstellation, n0: float) -> float:
    """Union bound on the per-source SEP of the relay-to-destination link."""
    return _mean_corrupted_fraction(const_s, n0)


def pe_sr(const_y: LabeledConstellation, n0: float) -> float:
    """Union bound on the per-source SEP of the source-to-relay sum detection.

    Identical structure to the destination link but over the pairwise-sum
    constellation, whose points carry unequal preimage-count priors.
    """
    return _mean_corrupted_fraction(const_y, n0)


def error_count_distribution(const: LabeledConstellation, n0: float) -> np.ndarray:
    """Distribution of the number of corrupted source positions per detection.

    Entry k is the (clamped) union bound on exactly-k-position errors; entry 0
    absorbs the remainder so the vector sums to 1.
    """
    n = const.n_sources
    probs = np.zeros(n + 1)
    for k in range(1, n + 1):
        probs[k] = pe_k(const, n0, k)
    total = probs[1:].sum()
    if total > 1.0:
        probs[1:] /= total
        total = 1.0
    probs[0] = 1.0 - total
    return probs


def p_prime(const_s: LabeledConstellation, n0_sr: float, n0_rd: float | None = None) -> float:
    """Lucky double-error term of the baseline: the relay mis-detects a -> b
    and the destination mis-detects b back to a, per source position.

    The per-position sets contain every point whose label differs from the
    reference at that position, regardless of the other positions.
    """
    if n0_rd is None:
        n0_rd = n0_sr
    q_sr = _q_pairwise(const_s, n0_sr)
    q_rd = _q_pairwise(const_s, n0_rd)
    labels = const_s.labels
    n, size = const_s.n_sources, len(const_s)
    total = 0.0
    for pos in range(n):
        differs = np.abs(labels[:, pos][:, None] - labels[:, pos][None, :]) > 1e-9
        total += float((q_sr * q_rd.T * differs).sum())
    return total / (n * size)


def _f_image_indices(
    const_y: LabeledConstellation, const_s: LabeledConstellation, mapper: PncMapper
) -> np.ndarray:
    """Index into the source constellation of each sum point's coded image.

    The relay applies the many-to-one map component-wise to its detected sums
    before forwarding, so each sum label corresponds to exactly one forwarded
    source-constellation point.
    """
    out = np.empty(len(const_y), dtype=int)
    for i, z in enumerate(const_y.labels):
        out[i] = const_s.index_of_label(mapper.f_vec(z))
    return out


def p_triple_prime(
    const_y: LabeledConstellation,
    const_s: LabeledConstellation,
    mapper: PncMapper,
    n0_sr: float,
    n0_rd: float | None = None,
) -> float:
    """Lucky term of the proposed scheme with a clean first hop: the relay
    mis-detects the sum, forwards the wrong coded image, and the destination
    mis-detects that image back to the one a correct relay would have sent.

    Evaluated exactly as the prior-weighted product of the two pairwise terms;
    when the two sums share a coded image the second factor degenerates to
    Q(0) = 1/2, which undercounts the true recovery probability and therefore
    keeps the assembled throughput bound a lower bound.
    """
    if n0_rd is None:
        n0_rd = n0_sr
    q_y = _q_pairwise(const_y, n0_sr)
    q_s = _q_pairwise(const_s, n0_rd)
    fmap = _f_image_indices(const_y, const_s, mapper)
    labels = const_y.labels
    n = const_y.n_sources
    total = 0.0
    for pos in range(n):
        differs = np.abs(labels[:, pos][:, None] - labels[:, pos][None, :]) > 1e-9
        pair_term = q_s[fmap[:, None], fmap[None, :]].T  # [a, b] -> Q over (s_b, s_a)
        total += float(const_y.priors @ ((q_y * pair_term * differs).sum(axis=1)))
    return total / n


def _g_inverse_table(mapper: PncMapper) -> dict:
    """(stored_symbol, wanted_output) -> unique second argument of the demap."""
    table = {}
    pts = mapper.alphabet.points
    for stored in pts:
        for cur in pts:
            out = mapper.g(stored, cur)
            table[(complex(stored), complex(out))] = complex(cur)
    return table


def p_case2(
    const_s: LabeledConstellation,
    const_y: LabeledConstellation,
    mapper: PncMapper,
    n0_sr: float,
    n0_rd: float | None = None,
) -> float:
    """Lucky term of the proposed scheme with a corrupted first hop.

    The destination mis-reads the forwarded vector at one position, and the
    next slot's detection lands on a value whose demap output still matches
    the true source symbol. The event chains a destination error, a relay sum
    event, and a second destination event restricted to the demap-consistent
    set; each link probability is the pairwise term of the respective
    constellation (self terms again contribute Q(0) = 1/2, an undercount).
    """
    if n0_rd is None:
        n0_rd = n0_sr
    q_s = _q_pairwise(const_s, n0_rd)
    q_y = _q_pairwise(const_y, n0_sr)
    fmap = _f_image_indices(const_y, const_s, mapper)
    ginv = _g_inverse_table(mapper)
    x_labels = const_s.labels
    n, size = const_s.n_sources, len(const_s)
    alphabet_pts = [complex(v) for v in mapper.alphabet.points]
    m = len(alphabet_pts)

    # T1[k, pos, v] = sum of Q(d) from the coded image of sum k to every source
    # point whose label has value v at position pos
    t1 = np.zeros((len(const_y), n, m))
    for vi, v in enumerate(alphabet_pts):
        for pos in range(n):
            sel = np.abs(x_labels[:, pos] - v) < 1e-9
            t1[:, pos, vi] = q_s[fmap][:, sel].sum(axis=1)
    # fold in the relay sum event: H[j, pos, v] = sum_k QY[j, k] * T1[k, pos, v]
    h = np.einsum("jk,kpv->jpv", q_y, t1)

    # index of the sum vector generated by source vector b against forwarded a
    sum_index = np.empty((size, size), dtype=int)
    for a in range(size):
        for b in range(size):
            sum_index[a, b] = const_y.index_of_label(x_labels[b] + x_labels[a])

    value_index = {v: i for i, v in enumerate(alphabet_pts)}
    total = 0.0
    for pos in range(n):
        for a in range(size):
            va = complex(x_labels[a, pos])
            for a2 in range(size):
                if complex(x_labels[a2, pos]) == va:
                    continue
                stored = complex(x_labels[a2, pos])
                inner = 0.0
                for b in range(size):
                    want = complex(x_labels[b, pos])
                    v_star = ginv[(stored, want)]
                    inner += h[sum_index[a, b], pos, value_index[v_star]]
                total += q_s[a, a2] * inner / size
    return total / (n * size)


def t_cfnc_lower_bound(
    const_s: LabeledConstellation, n0: float, n0_rd: float | None = None
) -> float:
    """Throughput lower bound per source for the baseline scheme.

    Half of (both hops clean) + (lucky double error); the half reflects the
    two slots each symbol costs.
    """
    if n0_rd is None:
        n0_rd = n0
    p_sr = _clamp(pe_rd(const_s, n0))  # no interference: same form as the RD link
    p_rd = _clamp(pe_rd(const_s, n0_rd))
    lucky = _clamp(p_prime(const_s, n0, n0_rd))
    return _clamp(0.5 * ((1.0 - p_sr) * (1.0 - p_rd) + lucky))


def t_new_lower_bound(
    const_s: LabeledConstellation,
    const_y: LabeledConstellation,
    mapper: PncMapper,
    n0: float,
    n0_rd: float | None = None,
    L: int | None = None,
) -> float:
    """Throughput lower bound per source for the two-path scheme.

    With L=None, returns the steady-state (long-frame) limit: a symbol gets
    through when all three of its link decisions are clean, plus the two lucky
    cancellation terms. With finite L, the first slot is interference-free and
    the frame pays one extra slot, so the bound is the slot-weighted average.
    """
    if n0_rd is None:
        n0_rd = n0
    p_sr = _clamp(pe_sr(const_y, n0))
    p_rd = _clamp(pe_rd(const_s, n0_rd))
    lucky1 = _clamp((1.0 - p_rd) * _clamp(p_triple_prime(const_y, const_s, mapper, n0, n0_rd)))
    lucky2 = _clamp(p_case2(const_s, const_y, mapper, n0, n0_rd))
    steady = _clamp((1.0 - p_sr) * (1.0 - p_rd) ** 2 + lucky1 + lucky2)
    if L is None:
        return steady
    if L < 1:
        raise ConfigError(f"L must be >= 1, got {L}")
    p_sr_clean = _clamp(pe_rd(const_s, n0))
    first = _clamp((1.0 - p_sr_clean) * (1.0 - p_rd) + _clamp(p_prime(const_s, n0, n0_rd)))
    return _clamp((first + (L - 1) * steady) / (L + 1))


# ---------------------------------------------------------------------------
# Rayleigh fading
# ---------------------------------------------------------------------------


def rayleigh_pairwise_rd(d_ab: float, sigma2: float, n0: float) -> float:
    """Closed-form fading average of the pairwise error bound for a single-
    coefficient link: 2 N0 / (2 N0 + sigma2 * d^2).

    sigma2 here is the squared Rayleigh scale of the coefficient magnitude,
    i.e. half the mean channel power E|h|^2. Callers holding a profile
    variance (mean power) should pass sigma2 = power / 2.
    """
    d2 = float(d_ab) ** 2
    if n0 <= 0:
        return 1.0 if d2 == 0.0 else 0.0
    return float(2.0 * n0 / (2.0 * n0 + sigma2 * d2))


def pe_rd_rayleigh(const_s: LabeledConstellation, mean_power: float, n0: float) -> float:
    """Per-source SEP bound of the fading relay-to-destination link.

    Substitutes the closed-form fading average for each pairwise term; both
    relays share the statistics so the two-relay average equals either one.
    """
    if n0 <= 0:
        return 0.0
    pw = 2.0 * n0 / (2.0 * n0 + (mean_power / 2.0) * const_s.dist**2)
    np.fill_diagonal(pw, 0.0)
    return _mean_corrupted_fraction(const_s, n0, pairwise=pw)


def _faded_union_bound(const, n0: float, n_sources: int, use_dmin: bool) -> float:
    """Prior-weighted zero-norm-partitioned pairwise bound on one realization."""
    zn = const.zero_norm_matrix()
    if n0 <= 0:
        return 0.0
    if use_dmin:
        # keep only each point's nearest neighbour, weighted by its zero-norm
        d = const.dist.copy()
        np.fill_diagonal(d, np.inf)
        nearest = np.argmin(d, axis=1)
        rows = np.arange(len(const))
        q = q_function(d[rows, nearest] / np.sqrt(2.0 * n0))
        return float(const.priors @ (q * zn[rows, nearest])) / n_sources
    q = q_function(const.dist / np.sqrt(2.0 * n0))
    return float(const.priors @ (q * zn).sum(axis=1)) / n_sources


def rayleigh_pe_sr(
    theta: PrecodingVector,
    alphabet: Alphabet,
    profile: FadingProfile,
    n0: float,
    n_channel_samples: int,
    rng: np.random.Generator,
    use_dmin: bool = False,
    include_iri: bool = True,
) -> tuple[float, float]:
    """Channel-averaged per-source SEP bound of the fading sum-detection link.

    For each channel draw, builds the faded joint constellation (merging
    coincident points, so a degenerate all-ones channel collapses exactly onto
    the plain sum constellation), evaluates the prior-weighted zero-norm-
    partitioned pairwise bound, and averages over draws. Returns (estimate,
    standard error). With use_dmin each point contributes only its nearest-
    neighbour term. With include_iri=False the relay leakage is absent (the
    baseline's interference-free hop) and the constellation collapses onto the
    source vectors alone.
    """
    if n_channel_samples < RAYLEIGH_SAMPLE_FLOOR:
        raise InsufficientSamples(
            f"need at least {RAYLEIGH_SAMPLE_FLOOR} channel samples, got {n_channel_samples}"
        )
    n = theta.n_sources
    fixed = profile.kind != RAYLEIGH
    sigma_sr = np.sqrt(profile.sigma2_sr[:, 0])
    sigma_rr = np.sqrt(profile.sigma2_rr)
    values = np.empty(n_channel_samples)
    for i in range(n_channel_samples):
        if fixed:
            h = np.ones(n, dtype=complex)
            h12 = 1.0 + 0j
        else:
            h = crandn(rng, (n,)) * sigma_sr
            h12 = complex(crandn(rng) * sigma_rr)
        if not include_iri:
            h12 = 0.0 + 0j
        const = build_faded_sum_constellation(theta, alphabet, h, h12)
        values[i] = _faded_union_bound(const, n0, n, use_dmin)
        if fixed:
            # every draw is identical; no need to repeat the evaluation
            values[:] = values[0]
            break
    est = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(n_channel_samples)) if n_channel_samples > 1 else 0.0
    return est, stderr


# ---------------------------------------------------------------------------
# Assembled reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """All analytical quantities for one operating point."""

    channel: str
    snr_db: float
    n0_sr: float
    n0_rd: float
    n_sources: int
    modulation: str
    p_e_rd: float
    p_e_sr: float
    p_e_sr_no_iri: float
    p_prime: float
    p_case1: float
    p_case2: float
    t_cfnc_lb: float
    t_new_lb: float
    t_new_lb_finite_l: float | None
    L: int | None
    saturated: bool
    p_e_sr_stderr: float = 0.0
    metadata: dict = field(default_factory=dict)


def compute_bound_report(
    theta: PrecodingVector,
    alphabet: Alphabet,
    snr_db: float,
    profile: FadingProfile,
    L: int | None = None,
    rng: np.random.Generator | None = None,
    n_channel_samples: int = RAYLEIGH_SAMPLE_FLOOR,
    use_dmin: bool = False,
) -> BoundReport:
    """Evaluate every bound at one operating point, AWGN or Rayleigh.

    Under fading the product (lucky) terms have no closed fading average, so
    they are dropped; omitting non-negative terms keeps both throughput
    expressions lower bounds.
    """
    const_s = build_source_constellation(theta, alphabet)
    const_y = build_sum_constellation(theta, alphabet)
    mapper = get_mapper(alphabet)
    n0_sr, n0_rd = profile.n0_sr, profile.n0_rd
    stderr = 0.0
    if profile.kind == RAYLEIGH:
        if rng is None:
            raise ConfigError("Rayleigh bounds need an explicit rng for channel sampling")
        raw_rd = float(
            np.mean([pe_rd_rayleigh(const_s, float(s2), n0_rd) for s2 in profile.sigma2_rd])
        )
        raw_sr, stderr = rayleigh_pe_sr(
            theta, alphabet, profile, n0_sr, n_channel_samples, rng, use_dmin=use_dmin
        )
        raw_sr_clean, _ = rayleigh_pe_sr(
            theta,
            alphabet,
            profile,
            n0_sr,
            n_channel_samples,
            rng,
            use_dmin=use_dmin,
            include_iri=False,
        )
        lucky_p, lucky1, lucky2 = 0.0, 0.0, 0.0
    else:
        raw_rd = pe_rd(const_s, n0_rd)
        raw_sr = pe_sr(const_y, n0_sr)
        raw_sr_clean = pe_rd(const_s, n0_sr)
        lucky_p = _clamp(p_prime(const_s, n0_sr, n0_rd))
        lucky1 = _clamp(
            (1.0 - _clamp(raw_rd)) * _clamp(p_triple_prime(const_y, const_s, mapper, n0_sr, n0_rd))
        )
        lucky2 = _clamp(p_case2(const_s, const_y, mapper, n0_sr, n0_rd))
    saturated = raw_rd > 1.0 or raw_sr > 1.0 or raw_sr_clean > 1.0
    p_rd, p_sr, p_sr_clean = _clamp(raw_rd), _clamp(raw_sr), _clamp(raw_sr_clean)

    t_cfnc = _clamp(0.5 * ((1.0 - p_sr_clean) * (1.0 - p_rd) + lucky_p))
    steady = _clamp((1.0 - p_sr) * (1.0 - p_rd) ** 2 + lucky1 + lucky2)
    finite = None
    if L is not None:
        first = _clamp((1.0 - p_sr_clean) * (1.0 - p_rd) + lucky_p)
        finite = _clamp((first + (L - 1) * steady) / (L + 1))
    return BoundReport(
        channel=profile.kind,
        snr_db=snr_db,
        n0_sr=n0_sr,
        n0_rd=n0_rd,
        n_sources=theta.n_sources,
        modulation=alphabet.name,
        p_e_rd=p_rd,
        p_e_sr=p_sr,
        p_e_sr_no_iri=p_sr_clean,
        p_prime=lucky_p,
        p_case1=lucky1,
        p_case2=lucky2,
        t_cfnc_lb=t_cfnc,
        t_new_lb=steady,
        t_new_lb_finite_l=finite,
        L=L,
        saturated=saturated,
        p_e_sr_stderr=stderr,
        metadata={"theta": theta.describe()},
    )
