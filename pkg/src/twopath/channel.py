"""Per-slot channel realizations and complex Gaussian noise.

Two channel kinds are modeled: ideal AWGN (every coefficient exactly 1) and
flat slow Rayleigh fading (independent circular-symmetric complex Gaussian
coefficients per slot). Coefficients are constant within a slot and redrawn
independently from slot to slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NonPositiveDistance

AWGN = "awgn"
RAYLEIGH = "rayleigh"


def crandn(rng: np.random.Generator, shape=()) -> np.ndarray:
    """Unit-variance circular-symmetric complex Gaussian samples.

    The real/imag draw layout is the determinism contract for everything that
    consumes randomness: a bulk draw of shape (k, ...) equals k successive
    draws of shape (...) from the same generator.
    """
    if isinstance(shape, int):
        shape = (shape,)
    z = rng.standard_normal(size=tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class FadingProfile:
    """Channel statistics plus per-link noise densities.

    sigma2_sr[i, m] is the mean power gain E|h|^2 between source i and relay m;
    the inter-relay link is reciprocal and uses the single variance sigma2_rr.
    For the AWGN kind all coefficients are forced to exactly 1 and the
    variances are ignored.
    """

    kind: str
    n_sources: int
    n0_sr: float
    n0_rd: float
    sigma2_sr: np.ndarray = field(default=None)
    sigma2_rr: float = 1.0
    sigma2_rd: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.kind not in (AWGN, RAYLEIGH):
            raise ConfigError(f"unknown channel kind {self.kind!r}")
        if self.n0_sr < 0 or self.n0_rd < 0:
            raise ConfigError("noise densities must be non-negative")
        if self.sigma2_sr is None:
            object.__setattr__(self, "sigma2_sr", np.ones((self.n_sources, 2)))
        else:
            object.__setattr__(self, "sigma2_sr", np.asarray(self.sigma2_sr, dtype=float))
        if self.sigma2_rd is None:
            object.__setattr__(self, "sigma2_rd", np.ones(2))
        else:
            object.__setattr__(self, "sigma2_rd", np.asarray(self.sigma2_rd, dtype=float))
        if self.sigma2_sr.shape != (self.n_sources, 2):
            raise ConfigError(f"sigma2_sr must have shape ({self.n_sources}, 2)")
        if self.sigma2_rd.shape != (2,):
            raise ConfigError("sigma2_rd must have shape (2,)")
        if self.kind == RAYLEIGH and (
            np.any(self.sigma2_sr <= 0) or self.sigma2_rr <= 0 or np.any(self.sigma2_rd <= 0)
        ):
            raise ConfigError("Rayleigh variances must be positive")

    def with_noise(self, n0_sr: float, n0_rd: float) -> "FadingProfile":
        return FadingProfile(
            kind=self.kind,
            n_sources=self.n_sources,
            n0_sr=n0_sr,
            n0_rd=n0_rd,
            sigma2_sr=self.sigma2_sr,
            sigma2_rr=self.sigma2_rr,
            sigma2_rd=self.sigma2_rd,
        )


def awgn_profile(n_sources: int, n0_sr: float, n0_rd: float | None = None) -> FadingProfile:
    if n0_rd is None:
        n0_rd = n0_sr
    return FadingProfile(kind=AWGN, n_sources=n_sources, n0_sr=n0_sr, n0_rd=n0_rd)


def rayleigh_profile(
    n_sources: int,
    n0_sr: float,
    n0_rd: float | None = None,
    sigma2_sr=None,
    sigma2_rr: float = 1.0,
    sigma2_rd=None,
) -> FadingProfile:
    if n0_rd is None:
        n0_rd = n0_sr
    return FadingProfile(
        kind=RAYLEIGH,
        n_sources=n_sources,
        n0_sr=n0_sr,
        n0_rd=n0_rd,
        sigma2_sr=sigma2_sr,
        sigma2_rr=sigma2_rr,
        sigma2_rd=sigma2_rd,
    )


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One slot's worth of coefficients.

    h_sr[m, i] is the source-i to relay-(m+1) coefficient; h_rd[m] the
    relay-(m+1) to destination coefficient. The single h_12 value serves both
    inter-relay directions within the slot (reciprocity).
    """

    h_sr: np.ndarray
    h_12: complex
    h_rd: np.ndarray
    slot_index: int = 0


def sample_realization(
    profile: FadingProfile, rng: np.random.Generator, slot: int = 0
) -> ChannelRealization:
    """Draw one slot's coefficients; AWGN consumes no randomness."""
    n = profile.n_sources
    if profile.kind == AWGN:
        return ChannelRealization(
            h_sr=np.ones((2, n), dtype=complex),
            h_12=1.0 + 0j,
            h_rd=np.ones(2, dtype=complex),
            slot_index=slot,
        )
    h_sr = crandn(rng, (2, n)) * np.sqrt(profile.sigma2_sr.T)
    h_12 = complex(crandn(rng) * np.sqrt(profile.sigma2_rr))
    h_rd = crandn(rng, (2,)) * np.sqrt(profile.sigma2_rd)
    return ChannelRealization(h_sr=h_sr, h_12=h_12, h_rd=h_rd, slot_index=slot)


def sample_realizations(
    profile: FadingProfile, rng: np.random.Generator, n_slots: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bulk per-frame channel draw: (h_sr, h_12, h_rd) for all slots.

    Shapes: (n_slots, 2, n_sources), (n_slots,), (n_slots, 2). The draw order
    (all h_sr, then all h_12, then all h_rd) is part of the per-frame
    determinism contract shared by the sequential and batched frame runners.
    """
    n = profile.n_sources
    if profile.kind == AWGN:
        return (
            np.ones((n_slots, 2, n), dtype=complex),
            np.ones(n_slots, dtype=complex),
            np.ones((n_slots, 2), dtype=complex),
        )
    h_sr = crandn(rng, (n_slots, 2, n)) * np.sqrt(profile.sigma2_sr.T)[None, :, :]
    h_12 = crandn(rng, (n_slots,)) * np.sqrt(profile.sigma2_rr)
    h_rd = crandn(rng, (n_slots, 2)) * np.sqrt(profile.sigma2_rd)[None, :]
    return h_sr, h_12, h_rd


def add_noise(signal, n0: float, rng: np.random.Generator):
    """signal + w with w complex Gaussian of total variance n0 (n0/2 per part)."""
    if n0 < 0:
        raise ConfigError("noise density must be non-negative")
    if n0 == 0.0:
        return signal
    w = crandn(rng, np.shape(signal)) * np.sqrt(n0)
    return signal + w


def pathloss_db(distance_m: float) -> float:
    """Distance-dependent attenuation in dB."""
    if distance_m <= 0:
        raise NonPositiveDistance(f"distance must be positive, got {distance_m}")
    return 15.3 + 37.6 * np.log10(distance_m)


def snr_from_pathloss(
    distance_m: float,
    tx_power_dbm: float,
    noise_dbm_per_hz: float = -174.0,
    bandwidth_hz: float = 1.0,
) -> float:
    """Linear SNR implied by the link budget; convenience for geometry-driven
    configs (the simulator itself only consumes N0 = 1/SNR)."""
    noise_dbm = noise_dbm_per_hz + 10.0 * np.log10(bandwidth_hz)
    snr_db = tx_power_dbm - pathloss_db(distance_m) - noise_dbm
    return float(10.0 ** (snr_db / 10.0))


def snr_db_to_n0(snr_db: float) -> float:
    """Noise density for a target link SNR under unit transmit power."""
    return float(10.0 ** (-snr_db / 10.0))
