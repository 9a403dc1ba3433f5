"""Per-slot state machines for the two relaying schemes.

TwoPathIRIC: two half-duplex relays alternate listen/forward roles so the
sources transmit every slot; L source vectors cost L+1 slots. The listening
relay jointly detects the superposition of the fresh source symbols and the
other relay's forwarded signal, network-codes the sums, and forwards them next
slot; the destination undoes the coding with the demap chain.

BaselineCFNC: sources transmit on odd slots to both relays (no inter-relay
interference), both relays forward their detections on even slots, and the
destination combines the two branches; L source vectors cost 2L slots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channel import AWGN, FadingProfile, crandn, sample_realizations
from .constellation import (
    Alphabet,
    LabeledConstellation,
    PrecodingVector,
    build_faded_sum_constellation,
    build_source_constellation,
    build_sum_constellation,
)
from .detection import nearest_index
from .errors import ConfigError
from .pnc import PncMapper, get_mapper

SCHEME_TWOPATH = "TwoPathIRIC"
SCHEME_BASELINE = "BaselineCFNC"
SCHEMES = (SCHEME_TWOPATH, SCHEME_BASELINE)


@dataclass(frozen=True, eq=False)
class FrameConfig:
    """Everything needed to run one frame of either scheme."""

    n_sources: int
    L: int
    alphabet: Alphabet
    theta: PrecodingVector
    profile: FadingProfile
    scheme: str = SCHEME_TWOPATH

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.L < 1:
            raise ConfigError(f"L must be >= 1, got {self.L}")
        if self.n_sources < 2:
            raise ConfigError(f"need at least 2 sources, got {self.n_sources}")
        if self.theta.n_sources != self.n_sources:
            raise ConfigError(
                f"theta has {self.theta.n_sources} weights for {self.n_sources} sources"
            )
        if self.profile.n_sources != self.n_sources:
            raise ConfigError("profile and frame disagree on the number of sources")
        if self.theta.alphabet.name != self.alphabet.name:
            raise ConfigError("theta was normalized for a different alphabet")

    @property
    def n_slots(self) -> int:
        return self.L + 1 if self.scheme == SCHEME_TWOPATH else 2 * self.L


def _complex_list(arr) -> list | None:
    if arr is None:
        return None
    a = np.asarray(arr)
    return [[float(z.real), float(z.imag)] for z in a.ravel()]


@dataclass(eq=False)
class SlotRecord:
    """What happened in one slot, for the debug log."""

    slot: int
    listening_relay: int | None = None
    forwarding_relay: int | None = None
    x: np.ndarray | None = None
    x_r: np.ndarray | None = None
    relay_sums_true: np.ndarray | None = None
    relay_sums_hat: np.ndarray | None = None
    dest_hat: np.ndarray | None = None
    recovered_slot: int | None = None
    recovered: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "slot": self.slot,
            "listening_relay": self.listening_relay,
            "forwarding_relay": self.forwarding_relay,
            "x": _complex_list(self.x),
            "x_r": _complex_list(self.x_r),
            "relay_sums_true": _complex_list(self.relay_sums_true),
            "relay_sums_hat": _complex_list(self.relay_sums_hat),
            "dest_hat": _complex_list(self.dest_hat),
            "recovered_slot": self.recovered_slot,
            "recovered": _complex_list(self.recovered),
        }


@dataclass(eq=False)
class FrameLog:
    """Complete record of one frame.

    Error arrays are indexed by source-symbol slot (1..L -> row 0..L-1).
    rd_err rows follow the physical slot index instead, with rd_present
    flagging slots where the destination actually detected something. For the
    baseline scheme sr_err has a middle relay axis of size 2.
    """

    scheme: str
    n_sources: int
    L: int
    detector_form: str
    x: np.ndarray
    x_hat: np.ndarray
    sr_err: np.ndarray
    rd_err: np.ndarray
    rd_present: np.ndarray
    chain_err: np.ndarray
    slots: list[SlotRecord] = field(default_factory=list)

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    def to_jsonl(self) -> str:
        """One JSON object per slot; schema documented in the README."""
        return "\n".join(json.dumps(rec.to_dict()) for rec in self.slots)


@dataclass(frozen=True)
class FrameScore:
    """Per-frame tallies used by the Monte Carlo aggregation."""

    successes: int
    symbols: int
    sr_errors: int
    sr_decisions: int
    rd_errors: int
    rd_decisions: int
    lucky_successes: int
    slots_used: int

    @property
    def throughput_per_ts(self) -> float:
        return self.successes / self.slots_used


def _draw_source_symbols(
    config: FrameConfig, rng: np.random.Generator, source_symbols
) -> np.ndarray:
    pts = np.asarray(config.alphabet.points)
    if source_symbols is None:
        idx = rng.integers(0, config.alphabet.M, size=(config.L, config.n_sources))
        return pts[idx]
    x = np.asarray(source_symbols, dtype=complex)
    if x.shape != (config.L, config.n_sources):
        raise ConfigError(
            f"source_symbols must have shape ({config.L}, {config.n_sources}), got {x.shape}"
        )
    return x


def _faded_source_candidates(
    theta: PrecodingVector, src_labels: np.ndarray, h_sr_row: np.ndarray
) -> np.ndarray:
    return theta.norm_scale * (src_labels @ (theta.thetas * h_sr_row))


def run_twopath_frame(
    config: FrameConfig,
    rng: np.random.Generator,
    source_symbols=None,
    initial_relay_state=None,
) -> FrameLog:
    """Run one L+1 slot frame of the two-path scheme.

    With initial_relay_state the frame starts mid-stream: the first slot
    already carries a forwarded vector (used to replay known sequences), so
    every recovery goes through the demap. Without it, slot 1 is the
    interference-free bootstrap whose detection is forwarded un-coded and
    recovered directly.
    """
    if config.scheme != SCHEME_TWOPATH:
        raise ConfigError(f"config.scheme is {config.scheme}, expected {SCHEME_TWOPATH}")
    n, L = config.n_sources, config.L
    n_slots = config.n_slots
    theta, alphabet, profile = config.theta, config.alphabet, config.profile
    c, th = theta.norm_scale, theta.thetas
    mapper = get_mapper(alphabet)
    awgn = profile.kind == AWGN
    src_const = build_source_constellation(theta, alphabet)
    sum_const = build_sum_constellation(theta, alphabet) if awgn else None

    mid = initial_relay_state is not None
    if mid:
        fwd = np.asarray(initial_relay_state, dtype=complex)
        if fwd.shape != (n,):
            raise ConfigError(f"initial_relay_state must have shape ({n},)")
    else:
        fwd = None

    # Per-frame randomness contract: source symbols, channels, relay noise,
    # destination noise, in that order. The batched runner replays the same
    # order per frame so the two paths are bit-identical for equal seeds.
    x = _draw_source_symbols(config, rng, source_symbols)
    h_sr_all, h12_all, h_rd_all = sample_realizations(profile, rng, n_slots)
    w_r = crandn(rng, n_slots) * np.sqrt(profile.n0_sr)
    w_d = crandn(rng, n_slots) * np.sqrt(profile.n0_rd)

    x_hat = np.zeros((L, n), dtype=complex)
    sr_err = np.zeros((L, n), dtype=bool)
    rd_err = np.zeros((n_slots, n), dtype=bool)
    rd_present = np.zeros(n_slots, dtype=bool)
    chain_err = np.zeros((L, n), dtype=bool)
    dest_labels: list[np.ndarray | None] = [None] * n_slots
    fwd_sent: list[np.ndarray | None] = [None] * n_slots
    slots: list[SlotRecord] = []

    fwd_next = None
    for s in range(1, n_slots + 1):
        si = s - 1
        listener = 1 if s % 2 == 1 else 2
        has_forwarder = mid or s >= 2
        forwarder = (2 if s % 2 == 1 else 1) if has_forwarder else None
        rec = SlotRecord(slot=s, listening_relay=listener if s <= L else None,
                         forwarding_relay=forwarder)
        h_sr = h_sr_all[si, listener - 1]
        h12 = h12_all[si]
        h_rd = h_rd_all[si, forwarder - 1] if has_forwarder else None

        cur_fwd = fwd if s == 1 else fwd_next
        if s == 1 and not mid:
            cur_fwd = None
        # --- listening relay ---
        if s <= L:
            rec.x = x[si].copy()
            if cur_fwd is None:
                # bootstrap slot: no interference, detect the sources directly
                cand = src_const.points if awgn else _faded_source_candidates(theta, src_const.labels, h_sr)
                y_r = c * (x[si] @ (th * h_sr)) + w_r[si]
                idx, _ = nearest_index(y_r, cand)
                xhat1 = src_const.labels[idx]
                sr_err[si] = xhat1 != x[si]
                fwd_next = xhat1.copy()
                rec.relay_sums_true = x[si].copy()
                rec.relay_sums_hat = xhat1.copy()
            else:
                true_sums = x[si] + cur_fwd
                y_r = c * (x[si] @ (th * h_sr)) + h12 * c * (cur_fwd @ th) + w_r[si]
                if awgn:
                    idx, _ = nearest_index(y_r, sum_const.points)
                    sums_hat = sum_const.labels[idx]
                else:
                    faded = build_faded_sum_constellation(theta, alphabet, h_sr, h12)
                    idx, _ = nearest_index(y_r, faded.points)
                    pair = faded.pair_labels[idx]
                    sums_hat = pair[0] + pair[1]
                sr_err[si] = sums_hat != true_sums
                fwd_next = mapper.f_vec(sums_hat)
                rec.relay_sums_true = true_sums.copy()
                rec.relay_sums_hat = sums_hat.copy()

        # --- destination ---
        if has_forwarder:
            fwd_sent[si] = cur_fwd.copy()
            rec.x_r = cur_fwd.copy()
            y_d = h_rd * c * (cur_fwd @ th) + w_d[si]
            idx, _ = nearest_index(y_d, h_rd * src_const.points)
            dest = src_const.labels[idx]
            dest_labels[si] = dest
            rd_present[si] = True
            rd_err[si] = dest != cur_fwd
            rec.dest_hat = dest.copy()
            # recovery of the previous slot's source vector
            k = s - 1  # symbol index being recovered (1-based)
            if k >= 1:
                if not mid and k == 1:
                    recovered = dest.copy()
                else:
                    recovered = mapper.g_vec(dest_labels[si - 1], dest)
                x_hat[k - 1] = recovered
                rec.recovered_slot = k
                rec.recovered = recovered.copy()
        slots.append(rec)

    # chain flags: which link decisions each recovered symbol depended on
    for k in range(1, L + 1):
        flags = sr_err[k - 1].copy()
        if mid or k >= 2:
            flags |= rd_err[k - 1]
        flags |= rd_err[k]
        chain_err[k - 1] = flags

    return FrameLog(
        scheme=SCHEME_TWOPATH,
        n_sources=n,
        L=L,
        detector_form="sum" if awgn else "pair",
        x=x,
        x_hat=x_hat,
        sr_err=sr_err,
        rd_err=rd_err,
        rd_present=rd_present,
        chain_err=chain_err,
        slots=slots,
    )


def run_baseline_frame(
    config: FrameConfig,
    rng: np.random.Generator,
    source_symbols=None,
) -> FrameLog:
    """Run one 2L slot frame of the baseline scheme.

    Both relays detect on odd slots and forward their own estimates on even
    slots; the destination performs joint ML over the two branches. When the
    relays disagree the destination decision is counted as a relay-to-
    destination error only if it matches neither forwarded component.
    """
    if config.scheme != SCHEME_BASELINE:
        raise ConfigError(f"config.scheme is {config.scheme}, expected {SCHEME_BASELINE}")
    n, L = config.n_sources, config.L
    n_slots = config.n_slots
    theta, alphabet, profile = config.theta, config.alphabet, config.profile
    c, th = theta.norm_scale, theta.thetas
    awgn = profile.kind == AWGN
    src_const = build_source_constellation(theta, alphabet)

    x = _draw_source_symbols(config, rng, source_symbols)
    h_sr_all, _, h_rd_all = sample_realizations(profile, rng, n_slots)
    w_r = crandn(rng, (L, 2)) * np.sqrt(profile.n0_sr)
    w_d = crandn(rng, (L, 2)) * np.sqrt(profile.n0_rd)

    x_hat = np.zeros((L, n), dtype=complex)
    sr_err = np.zeros((L, 2, n), dtype=bool)
    rd_err = np.zeros((L, n), dtype=bool)
    chain_err = np.zeros((L, n), dtype=bool)
    slots: list[SlotRecord] = []

    for l in range(L):
        s_odd, s_even = 2 * l, 2 * l + 1  # 0-based slot indices
        rec_odd = SlotRecord(slot=s_odd + 1, x=x[l].copy())
        xhat_m = []
        for m in range(2):
            h = h_sr_all[s_odd, m]
            y = c * (x[l] @ (th * h)) + w_r[l, m]
            cand = src_const.points if awgn else _faded_source_candidates(theta, src_const.labels, h)
            idx, _ = nearest_index(y, cand)
            est = src_const.labels[idx]
            xhat_m.append(est)
            sr_err[l, m] = est != x[l]
        rec_odd.relay_sums_true = x[l].copy()
        rec_odd.relay_sums_hat = xhat_m[0].copy()
        slots.append(rec_odd)

        h1, h2 = h_rd_all[s_even]
        y1 = h1 * c * (xhat_m[0] @ th) + w_d[l, 0]
        y2 = h2 * c * (xhat_m[1] @ th) + w_d[l, 1]
        d2 = (
            np.abs(y1 - h1 * src_const.points) ** 2
            + np.abs(y2 - h2 * src_const.points) ** 2
        )
        idx = int(np.argmin(d2))
        dest = src_const.labels[idx]
        x_hat[l] = dest
        rd_err[l] = (dest != xhat_m[0]) & (dest != xhat_m[1])
        chain_err[l] = sr_err[l, 0] | sr_err[l, 1] | rd_err[l]
        rec_even = SlotRecord(
            slot=s_even + 1,
            forwarding_relay=0,  # both relays transmit this slot
            x_r=xhat_m[0].copy(),
            dest_hat=dest.copy(),
            recovered_slot=l + 1,
            recovered=dest.copy(),
        )
        slots.append(rec_even)

    return FrameLog(
        scheme=SCHEME_BASELINE,
        n_sources=n,
        L=L,
        detector_form="mrc",
        x=x,
        x_hat=x_hat,
        sr_err=sr_err,
        rd_err=rd_err,
        rd_present=np.ones(L, dtype=bool),
        chain_err=chain_err,
        slots=slots,
    )


def score_frame(log: FrameLog) -> FrameScore:
    """Per-frame symbol-success and per-link error tallies."""
    success = log.x_hat == log.x
    lucky = success & log.chain_err
    if log.scheme == SCHEME_TWOPATH:
        rd_errors = int(log.rd_err[log.rd_present].sum())
        rd_decisions = int(log.rd_present.sum()) * log.n_sources
    else:
        rd_errors = int(log.rd_err.sum())
        rd_decisions = log.L * log.n_sources
    return FrameScore(
        successes=int(success.sum()),
        symbols=log.L * log.n_sources,
        sr_errors=int(log.sr_err.sum()),
        sr_decisions=int(np.prod(log.sr_err.shape)),
        rd_errors=rd_errors,
        rd_decisions=rd_decisions,
        lucky_successes=int(lucky.sum()),
        slots_used=log.n_slots,
    )


def recover_sources(
    dest_labels: list, mapper: PncMapper, mid_stream: bool = False
) -> np.ndarray:
    """Recompute the recovery chain from a sequence of destination detections.

    dest_labels[k] is the detection at slot k+offset (offset 2 for a cold
    start, 1 mid-stream). Useful for fault-injection tests: flip one detection
    and diff the recoveries.
    """
    labels = [np.asarray(v, dtype=complex) for v in dest_labels]
    out = []
    if not mid_stream:
        out.append(labels[0].copy())
        pairs = zip(labels[:-1], labels[1:])
    else:
        pairs = zip(labels[:-1], labels[1:])
    for prev, cur in pairs:
        out.append(mapper.g_vec(prev, cur))
    return np.array(out) if out else np.zeros((0,))
