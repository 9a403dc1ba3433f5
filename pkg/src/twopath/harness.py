"""Monte Carlo experiment runner, statistics, and figure reproduction.

Frames are embarrassingly parallel: every frame owns a generator seeded from
(master seed, namespace, snr-point index, frame index), so results are
identical for any worker count or batching. The hot path below replays the
exact per-frame randomness contract of the sequential runners in protocol.py,
but advances all frames of one SNR point in lockstep with vectorized
detection; the test suite pins the two paths to bit-identical tallies.
"""

from __future__ import annotations

import csv
import json
import os
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import RAYLEIGH_SAMPLE_FLOOR, compute_bound_report
from .channel import AWGN, RAYLEIGH, FadingProfile, crandn, sample_realizations, snr_db_to_n0
from .constellation import (
    Alphabet,
    build_source_constellation,
    build_sum_constellation,
    enumerate_vectors,
    get_alphabet,
    make_custom_theta,
    make_vandermonde_theta,
)
from .detection import nearest_index_batch
from .errors import ConfigError, UnknownFigure
from .pnc import get_mapper
from .protocol import SCHEME_BASELINE, SCHEME_TWOPATH, FrameConfig

CSV_COLUMNS = [
    "scheme",
    "channel",
    "modulation",
    "n_sources",
    "snr_db",
    "snr_sr_db",
    "snr_rd_db",
    "L",
    "frames",
    "source",
    "throughput_per_ts",
    "throughput_per_source_ts",
    "sep_sr",
    "sep_rd",
    "sep_e2e",
    "ci_halfwidth",
    "seed",
]

OUTPUT_DIR_ENV = "TWOPATH_OUT_DIR"

# seed namespaces, so simulation and bound sampling never share streams
_NS_SIM = 0
_NS_BOUNDS = 1

_Z95 = 1.959963984540054


def estimate_ci(successes: int, trials: int) -> tuple[float, float]:
    """Binomial 95% confidence interval: normal approximation with a Wilson
    fallback when the success count is too small for it."""
    if trials <= 0:
        raise ConfigError("trials must be positive")
    p = successes / trials
    if successes < 10:
        z2 = _Z95 * _Z95
        half = _Z95 * np.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / (1 + z2 / trials)
        return p, float(half)
    return p, float(_Z95 * np.sqrt(p * (1 - p) / trials))


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One sweep: a frame template plus the SNR grid and accounting knobs."""

    frame: FrameConfig
    snr_grid_db: tuple
    snr_offsets_db: tuple = (0.0, 0.0)
    frames_per_point: int = 1000
    target_ci_halfwidth: float | None = None
    seed: int = 12345
    out_dir: str | None = None
    csv_name: str | None = None
    n_workers: int = 1
    rayleigh_bound_samples: int = RAYLEIGH_SAMPLE_FLOOR

    def __post_init__(self):
        if len(self.snr_grid_db) == 0:
            raise ConfigError("snr grid must be non-empty")
        if self.frames_per_point < 1:
            raise ConfigError("frames_per_point must be >= 1")
        if self.n_workers < 1:
            raise ConfigError("n_workers must be >= 1")

    def point_noise(self, snr_db: float) -> tuple[float, float]:
        off_sr, off_rd = self.snr_offsets_db
        return snr_db_to_n0(snr_db + off_sr), snr_db_to_n0(snr_db + off_rd)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from the JSON document schema."""
    try:
        f = dict(raw["frame"])
        n = int(f["n_sources"])
        alphabet = get_alphabet(f.get("alphabet", "BPSK"))
        if "theta" in f and f["theta"] is not None:
            theta = make_custom_theta([complex(re, im) for re, im in f["theta"]], alphabet)
        else:
            theta = make_vandermonde_theta(n, int(f.get("theta_row", 1)), alphabet)
        kind = f.get("channel", AWGN).lower()
        profile = FadingProfile(
            kind=kind,
            n_sources=n,
            n0_sr=1.0,
            n0_rd=1.0,
            sigma2_sr=f.get("sigma2_sr"),
            sigma2_rr=float(f.get("sigma2_rr", 1.0)),
            sigma2_rd=f.get("sigma2_rd"),
        )
        frame = FrameConfig(
            n_sources=n,
            L=int(f.get("L", 16)),
            alphabet=alphabet,
            theta=theta,
            profile=profile,
            scheme=f.get("scheme", SCHEME_TWOPATH),
        )
        outputs = raw.get("outputs") or {}
        return ExperimentConfig(
            frame=frame,
            snr_grid_db=tuple(float(v) for v in raw["snr_grid_db"]),
            snr_offsets_db=tuple(float(v) for v in raw.get("snr_offsets_db", (0.0, 0.0))),
            frames_per_point=int(raw.get("frames_per_point", 1000)),
            target_ci_halfwidth=raw.get("target_ci_halfwidth"),
            seed=int(raw.get("seed", 12345)),
            out_dir=outputs.get("dir"),
            csv_name=outputs.get("csv"),
            n_workers=int(raw.get("n_workers", 1)),
            rayleigh_bound_samples=int(raw.get("rayleigh_bound_samples", RAYLEIGH_SAMPLE_FLOOR)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid experiment config: {exc}") from exc


# ---------------------------------------------------------------------------
# batched frame simulation
# ---------------------------------------------------------------------------


@dataclass
class _Tally:
    successes: int = 0
    symbols: int = 0
    sr_errors: int = 0
    sr_decisions: int = 0
    rd_errors: int = 0
    rd_decisions: int = 0
    lucky: int = 0
    slots: int = 0
    frames: int = 0
    frame_successes: list = field(default_factory=list)

    def merge(self, other: "_Tally") -> None:
        self.successes += other.successes
        self.symbols += other.symbols
        self.sr_errors += other.sr_errors
        self.sr_decisions += other.sr_decisions
        self.rd_errors += other.rd_errors
        self.rd_decisions += other.rd_decisions
        self.lucky += other.lucky
        self.slots += other.slots
        self.frames += other.frames
        self.frame_successes.extend(other.frame_successes)


def _frame_seeds(master_seed: int, point_index: int, lo: int, hi: int) -> list:
    return [
        np.random.SeedSequence(entropy=master_seed, spawn_key=(_NS_SIM, point_index, j))
        for j in range(lo, hi)
    ]


def _draw_batch(config: FrameConfig, seeds) -> dict:
    """Stack every frame's randomness, drawn per frame in the contract order."""
    n, L = config.n_sources, config.L
    n_slots = config.n_slots
    profile = config.profile
    pts = np.asarray(config.alphabet.points)
    awgn = profile.kind == AWGN
    xs, hs, h12s, hrds, wrs, wds = [], [], [], [], [], []
    two_path = config.scheme == SCHEME_TWOPATH
    for ss in seeds:
        rng = np.random.default_rng(ss)
        xs.append(pts[rng.integers(0, config.alphabet.M, size=(L, n))])
        h_sr, h12, h_rd = sample_realizations(profile, rng, n_slots)
        if not awgn:
            hs.append(h_sr)
            h12s.append(h12)
            hrds.append(h_rd)
        if two_path:
            wrs.append(crandn(rng, n_slots) * np.sqrt(profile.n0_sr))
            wds.append(crandn(rng, n_slots) * np.sqrt(profile.n0_rd))
        else:
            wrs.append(crandn(rng, (L, 2)) * np.sqrt(profile.n0_sr))
            wds.append(crandn(rng, (L, 2)) * np.sqrt(profile.n0_rd))
    out = {"x": np.stack(xs), "w_r": np.stack(wrs), "w_d": np.stack(wds)}
    if not awgn:
        out["h_sr"] = np.stack(hs)
        out["h12"] = np.stack(h12s)
        out["h_rd"] = np.stack(hrds)
    return out


def _simulate_twopath_chunk(config: FrameConfig, seeds) -> _Tally:
    n, L = config.n_sources, config.L
    n_slots = config.n_slots
    theta, alphabet, profile = config.theta, config.alphabet, config.profile
    c, th = theta.norm_scale, theta.thetas
    awgn = profile.kind == AWGN
    mapper = get_mapper(alphabet)
    src_const = build_source_constellation(theta, alphabet)
    src_labels = src_const.labels
    sum_const = build_sum_constellation(theta, alphabet)
    base = enumerate_vectors(alphabet.points, n)
    m = len(base)
    pair_x = np.repeat(base, m, axis=0)
    pair_r = np.tile(base, (m, 1))
    pair_r_proj = pair_r @ th  # interference part of the faded candidates

    d = _draw_batch(config, seeds)
    x, w_r, w_d = d["x"], d["w_r"], d["w_d"]
    F = len(seeds)

    sr_err = np.zeros((F, L, n), dtype=bool)
    rd_err = np.zeros((F, n_slots, n), dtype=bool)
    x_hat = np.zeros((F, L, n), dtype=complex)
    cur_fwd = None
    nxt_fwd = None
    dest_prev = None

    for s in range(1, n_slots + 1):
        si = s - 1
        listener = 1 if s % 2 == 1 else 2
        forwarder = (2 if s % 2 == 1 else 1) if s >= 2 else None
        cur_fwd = nxt_fwd
        if awgn:
            h_sr_row = None
            h12 = None
            h_rd = None
        else:
            h_sr_row = d["h_sr"][:, si, listener - 1, :]
            h12 = d["h12"][:, si]
            h_rd = d["h_rd"][:, si, forwarder - 1] if forwarder else None

        if s <= L:
            if s == 1:
                if awgn:
                    y = c * (x[:, si] @ th) + w_r[:, si]
                    idx = nearest_index_batch(y, src_const.points)
                else:
                    y = c * np.einsum("fi,fi->f", x[:, si], th[None, :] * h_sr_row) + w_r[:, si]
                    cand = c * np.einsum("pi,fi->fp", base, th[None, :] * h_sr_row)
                    idx = nearest_index_batch(y, cand)
                xhat1 = src_labels[idx]
                sr_err[:, si] = xhat1 != x[:, si]
                nxt_fwd = xhat1.copy()
            else:
                true_sums = x[:, si] + cur_fwd
                if awgn:
                    y = c * (true_sums @ th) + w_r[:, si]
                    idx = nearest_index_batch(y, sum_const.points)
                    sums_hat = sum_const.labels[idx]
                else:
                    y = (
                        c * np.einsum("fi,fi->f", x[:, si], th[None, :] * h_sr_row)
                        + h12 * (c * (cur_fwd @ th))
                        + w_r[:, si]
                    )
                    cand = c * (
                        np.einsum("pi,fi->fp", pair_x, th[None, :] * h_sr_row)
                        + h12[:, None] * pair_r_proj[None, :]
                    )
                    idx = nearest_index_batch(y, cand)
                    sums_hat = pair_x[idx] + pair_r[idx]
                sr_err[:, si] = sums_hat != true_sums
                nxt_fwd = mapper.f_vec(sums_hat)

        if s >= 2:
            proj = c * (cur_fwd @ th)
            if awgn:
                y_d = proj + w_d[:, si]
                idx = nearest_index_batch(y_d, src_const.points)
            else:
                y_d = h_rd * proj + w_d[:, si]
                cand = h_rd[:, None] * src_const.points[None, :]
                idx = nearest_index_batch(y_d, cand)
            dest = src_labels[idx]
            rd_err[:, si] = dest != cur_fwd
            if s == 2:
                x_hat[:, 0] = dest
            else:
                x_hat[:, s - 2] = mapper.g_vec(dest_prev, dest)
            dest_prev = dest

    success = x_hat == x
    chain = sr_err.copy()
    chain[:, 1:] |= rd_err[:, 1:L]  # symbol k>=2 depends on slot k's detection
    chain |= rd_err[:, 1:]  # and every symbol on slot k+1's detection
    lucky = success & chain
    per_frame = success.sum(axis=(1, 2))
    return _Tally(
        successes=int(success.sum()),
        symbols=F * L * n,
        sr_errors=int(sr_err.sum()),
        sr_decisions=F * L * n,
        rd_errors=int(rd_err[:, 1:].sum()),
        rd_decisions=F * L * n,
        lucky=int(lucky.sum()),
        slots=F * n_slots,
        frames=F,
        frame_successes=per_frame.tolist(),
    )


def _simulate_baseline_chunk(config: FrameConfig, seeds) -> _Tally:
    n, L = config.n_sources, config.L
    n_slots = config.n_slots
    theta, alphabet, profile = config.theta, config.alphabet, config.profile
    c, th = theta.norm_scale, theta.thetas
    awgn = profile.kind == AWGN
    src_const = build_source_constellation(theta, alphabet)
    src_labels = src_const.labels
    base = src_labels
    proj = c * (base @ th)

    d = _draw_batch(config, seeds)
    x, w_r, w_d = d["x"], d["w_r"], d["w_d"]
    F = len(seeds)

    sr_err = np.zeros((F, L, 2, n), dtype=bool)
    rd_err = np.zeros((F, L, n), dtype=bool)
    x_hat = np.zeros((F, L, n), dtype=complex)

    for l in range(L):
        s_odd, s_even = 2 * l, 2 * l + 1
        ests = []
        for rm in range(2):
            if awgn:
                y = c * (x[:, l] @ th) + w_r[:, l, rm]
                idx = nearest_index_batch(y, proj)
            else:
                h = d["h_sr"][:, s_odd, rm, :]
                y = c * np.einsum("fi,fi->f", x[:, l], th[None, :] * h) + w_r[:, l, rm]
                cand = c * np.einsum("pi,fi->fp", base, th[None, :] * h)
                idx = nearest_index_batch(y, cand)
            est = src_labels[idx]
            ests.append(est)
            sr_err[:, l, rm] = est != x[:, l]
        if awgn:
            h1 = h2 = np.ones(F, dtype=complex)
        else:
            h1 = d["h_rd"][:, s_even, 0]
            h2 = d["h_rd"][:, s_even, 1]
        y1 = h1 * (c * (ests[0] @ th)) + w_d[:, l, 0]
        y2 = h2 * (c * (ests[1] @ th)) + w_d[:, l, 1]
        d2 = (
            np.abs(y1[:, None] - h1[:, None] * proj[None, :]) ** 2
            + np.abs(y2[:, None] - h2[:, None] * proj[None, :]) ** 2
        )
        idx = np.argmin(d2, axis=1)
        dest = src_labels[idx]
        x_hat[:, l] = dest
        rd_err[:, l] = (dest != ests[0]) & (dest != ests[1])

    success = x_hat == x
    chain = sr_err.any(axis=2) | rd_err
    lucky = success & chain
    per_frame = success.sum(axis=(1, 2))
    return _Tally(
        successes=int(success.sum()),
        symbols=F * L * n,
        sr_errors=int(sr_err.sum()),
        sr_decisions=F * L * 2 * n,
        rd_errors=int(rd_err.sum()),
        rd_decisions=F * L * n,
        lucky=int(lucky.sum()),
        slots=F * n_slots,
        frames=F,
        frame_successes=per_frame.tolist(),
    )


def _simulate_chunk(args) -> _Tally:
    config, master_seed, point_index, lo, hi = args
    seeds = _frame_seeds(master_seed, point_index, lo, hi)
    if config.scheme == SCHEME_TWOPATH:
        return _simulate_twopath_chunk(config, seeds)
    return _simulate_baseline_chunk(config, seeds)


def simulate_point(
    config: FrameConfig,
    master_seed: int,
    point_index: int,
    n_frames: int,
    n_workers: int = 1,
    first_frame: int = 0,
) -> _Tally:
    """Run n_frames frames of one operating point, deterministically."""
    if n_workers <= 1 or n_frames < 4 * n_workers:
        return _simulate_chunk((config, master_seed, point_index, first_frame, first_frame + n_frames))
    bounds = np.linspace(first_frame, first_frame + n_frames, n_workers + 1).astype(int)
    jobs = [
        (config, master_seed, point_index, int(lo), int(hi))
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    total = _Tally()
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        for part in pool.map(_simulate_chunk, jobs):  # chunk order fixed
            total.merge(part)
    return total


# ---------------------------------------------------------------------------
# sweeps and reports
# ---------------------------------------------------------------------------


def _throughput_ci(tally: _Tally, symbols_per_frame: int) -> float:
    """95% halfwidth of the per-symbol success rate from frame-level variance.

    Symbols within a frame share relay-chain decisions and are correlated, so
    the frame (cluster) estimator is used rather than the raw binomial one.
    """
    if tally.frames < 2:
        return 1.0
    rates = np.asarray(tally.frame_successes, dtype=float) / symbols_per_frame
    return float(_Z95 * rates.std(ddof=1) / np.sqrt(tally.frames))


def _sim_row(config: ExperimentConfig, frame: FrameConfig, snr_db: float, tally: _Tally) -> dict:
    n, L = frame.n_sources, frame.L
    p_hat = tally.successes / tally.symbols
    per_ts = tally.successes / tally.slots
    slots_per_frame = frame.n_slots
    hw_rate = _throughput_ci(tally, L * n)
    hw_per_source = hw_rate * (L * n) / slots_per_frame / n
    off_sr, off_rd = config.snr_offsets_db
    return {
        "scheme": frame.scheme,
        "channel": frame.profile.kind,
        "modulation": frame.alphabet.name,
        "n_sources": n,
        "snr_db": snr_db,
        "snr_sr_db": snr_db + off_sr,
        "snr_rd_db": snr_db + off_rd,
        "L": L,
        "frames": tally.frames,
        "source": "sim",
        "throughput_per_ts": per_ts,
        "throughput_per_source_ts": per_ts / n,
        "sep_sr": tally.sr_errors / tally.sr_decisions,
        "sep_rd": tally.rd_errors / tally.rd_decisions,
        "sep_e2e": 1.0 - p_hat,
        "ci_halfwidth": hw_per_source,
        "seed": config.seed,
    }


def run_sweep(config: ExperimentConfig, schemes=None, csv_path=None, include_theory=False):
    """Simulate every SNR point (optionally for both schemes), returning rows.

    Rows are appended to csv_path incrementally when given. With a CI target,
    each point keeps adding batches of frames_per_point frames (up to 100x)
    until the throughput halfwidth is below the target.
    """
    if schemes is None:
        schemes = [config.frame.scheme]
    rows = []
    writer = _IncrementalCsv(csv_path) if csv_path else None
    for scheme in schemes:
        for i, snr in enumerate(config.snr_grid_db):
            n0_sr, n0_rd = config.point_noise(snr)
            frame = replace(
                config.frame, scheme=scheme, profile=config.frame.profile.with_noise(n0_sr, n0_rd)
            )
            point_key = _point_key(scheme, i)
            tally = simulate_point(
                frame, config.seed, point_key, config.frames_per_point, config.n_workers
            )
            if config.target_ci_halfwidth is not None:
                while (
                    _throughput_ci(tally, frame.L * frame.n_sources) > config.target_ci_halfwidth
                    and tally.frames < 100 * config.frames_per_point
                ):
                    more = simulate_point(
                        frame,
                        config.seed,
                        point_key,
                        config.frames_per_point,
                        config.n_workers,
                        first_frame=tally.frames,
                    )
                    tally.merge(more)
            row = _sim_row(config, frame, snr, tally)
            rows.append(row)
            if writer:
                writer.write(row)
    if include_theory:
        theory = run_bounds(config, schemes=schemes)
        rows.extend(theory)
        if writer:
            for row in theory:
                writer.write(row)
    if writer:
        writer.close()
    return rows


def _point_key(scheme: str, index: int) -> int:
    # distinct RNG namespaces per scheme so shared grids stay independent
    return index if scheme == SCHEME_TWOPATH else 10_000 + index


def run_bounds(config: ExperimentConfig, schemes=None, csv_path=None):
    """Evaluate the analytical lower bounds over the grid (source=theory rows).

    Two-path rows carry the finite-L form matching the simulated frames;
    Rayleigh link terms are channel-sampled with their own seeded stream, and
    the reported halfwidth is the sampling standard error contribution.
    """
    if schemes is None:
        schemes = [config.frame.scheme]
    frame = config.frame
    rows = []
    writer = _IncrementalCsv(csv_path) if csv_path else None
    off_sr, off_rd = config.snr_offsets_db
    for i, snr in enumerate(config.snr_grid_db):
        n0_sr, n0_rd = config.point_noise(snr)
        profile = frame.profile.with_noise(n0_sr, n0_rd)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=config.seed, spawn_key=(_NS_BOUNDS, i))
        )
        report = compute_bound_report(
            frame.theta,
            frame.alphabet,
            snr,
            profile,
            L=frame.L,
            rng=rng if profile.kind == RAYLEIGH else None,
            n_channel_samples=config.rayleigh_bound_samples,
        )
        for scheme in schemes:
            if scheme == SCHEME_TWOPATH:
                per_source = report.t_new_lb_finite_l
                sep_sr = report.p_e_sr
                steady_fail = 1.0 - report.t_new_lb
            else:
                per_source = report.t_cfnc_lb
                sep_sr = report.p_e_sr_no_iri
                steady_fail = 1.0 - 2.0 * report.t_cfnc_lb
            row = {
                "scheme": scheme,
                "channel": profile.kind,
                "modulation": frame.alphabet.name,
                "n_sources": frame.n_sources,
                "snr_db": snr,
                "snr_sr_db": snr + off_sr,
                "snr_rd_db": snr + off_rd,
                "L": frame.L,
                "frames": 0,
                "source": "theory",
                "throughput_per_ts": per_source * frame.n_sources,
                "throughput_per_source_ts": per_source,
                "sep_sr": sep_sr,
                "sep_rd": report.p_e_rd,
                "sep_e2e": min(max(steady_fail, 0.0), 1.0),
                "ci_halfwidth": _Z95 * report.p_e_sr_stderr,
                "seed": config.seed,
            }
            rows.append(row)
            if writer:
                writer.write(row)
    if writer:
        writer.close()
    return rows


class _IncrementalCsv:
    """Row-at-a-time CSV writer with the fixed column order."""

    def __init__(self, path):
        self.path = path
        try:
            self._fh = open(path, "w", newline="")
        except OSError as exc:
            raise OSError(f"cannot open {path}: {exc}") from exc
        self._writer = csv.writer(self._fh)
        self._writer.writerow(CSV_COLUMNS)

    def write(self, row: dict) -> None:
        self._writer.writerow([_fmt(row[k]) for k in CSV_COLUMNS])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[k]) for k in CSV_COLUMNS])


def check_bound_ordering(rows) -> list[str]:
    """Flag theory rows that exceed their matching simulation row by more than
    the simulation CI halfwidth (a bound violation)."""
    sims = {}
    for r in rows:
        key = (r["scheme"], r["channel"], r["modulation"], r["n_sources"], r["snr_db"], r["L"])
        if r["source"] == "sim":
            sims[key] = r
    problems = []
    for r in rows:
        if r["source"] != "theory":
            continue
        key = (r["scheme"], r["channel"], r["modulation"], r["n_sources"], r["snr_db"], r["L"])
        sim = sims.get(key)
        if sim is None:
            continue
        slack = float(sim["ci_halfwidth"]) + float(r.get("ci_halfwidth", 0.0))
        if float(r["throughput_per_source_ts"]) > float(sim["throughput_per_source_ts"]) + slack:
            problems.append(
                f"bound above simulation at {key}: theory "
                f"{r['throughput_per_source_ts']:.5f} vs sim {sim['throughput_per_source_ts']:.5f}"
            )
    return problems


# ---------------------------------------------------------------------------
# canned figure reproduction
# ---------------------------------------------------------------------------

FIGURE_IDS = ("5", "6", "7", "8", "9-sep-proposed", "11")


def _figure_jobs(fig: str, L: int):
    both = [SCHEME_TWOPATH, SCHEME_BASELINE]
    if fig == "5":
        return [dict(n_sources=2, alphabet="BPSK", channel=AWGN, schemes=both, theory=True,
                     grid=tuple(range(-5, 31, 5)), offsets=(0.0, 0.0), L=L)]
    if fig == "6":
        return [dict(n_sources=3, alphabet="BPSK", channel=AWGN, schemes=both, theory=True,
                     grid=tuple(range(5, 31, 5)), offsets=(0.0, 0.0), L=L)]
    if fig == "7":
        return [dict(n_sources=2, alphabet="BPSK", channel=RAYLEIGH, schemes=both, theory=True,
                     grid=tuple(range(0, 41, 5)), offsets=(0.0, 0.0), L=L)]
    if fig == "8":
        return [
            dict(n_sources=2, alphabet="BPSK", channel=RAYLEIGH, schemes=[SCHEME_TWOPATH],
                 theory=False, grid=tuple(range(0, 31, 5)), offsets=off, L=L)
            for off in ((10.0, 0.0), (0.0, 10.0), (0.0, 0.0))
        ]
    if fig == "9-sep-proposed":
        return [dict(n_sources=2, alphabet="BPSK", channel=AWGN, schemes=[SCHEME_TWOPATH],
                     theory=True, grid=tuple(range(0, 17, 2)), offsets=(0.0, 0.0), L=L)]
    if fig == "11":
        return [
            dict(n_sources=2, alphabet="QPSK", channel=kind, schemes=[SCHEME_TWOPATH],
                 theory=True, grid=tuple(range(0, 41, 5)), offsets=(0.0, 0.0), L=L)
            for kind in (AWGN, RAYLEIGH)
        ]
    raise UnknownFigure(f"figure {fig!r} not in {FIGURE_IDS}")


def reproduce_figure(
    fig: str,
    out_dir: str,
    seed: int = 12345,
    frames: int = 2000,
    L: int = 16,
    n_workers: int = 1,
    theta_row: int = 1,
    rayleigh_bound_samples: int = RAYLEIGH_SAMPLE_FLOOR,
) -> tuple[str, str]:
    """Run the canned experiment behind one figure; returns (csv, manifest) paths."""
    fig = str(fig)
    jobs = _figure_jobs(fig, L)
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for job in jobs:
        alphabet = get_alphabet(job["alphabet"])
        theta = make_vandermonde_theta(job["n_sources"], theta_row, alphabet)
        profile = FadingProfile(kind=job["channel"], n_sources=job["n_sources"], n0_sr=1.0, n0_rd=1.0)
        frame = FrameConfig(
            n_sources=job["n_sources"], L=job["L"], alphabet=alphabet, theta=theta,
            profile=profile, scheme=job["schemes"][0],
        )
        cfg = ExperimentConfig(
            frame=frame,
            snr_grid_db=job["grid"],
            snr_offsets_db=job["offsets"],
            frames_per_point=frames,
            seed=seed,
            n_workers=n_workers,
            rayleigh_bound_samples=rayleigh_bound_samples,
        )
        rows.extend(run_sweep(cfg, schemes=job["schemes"], include_theory=job["theory"]))
    slug = fig.replace("-", "_")
    csv_path = os.path.join(out_dir, f"fig{slug}.csv")
    write_rows(csv_path, rows)
    problems = check_bound_ordering(rows)
    for p in problems:
        print(f"warning: {p}", file=sys.stderr)
    manifest = {
        "figure": fig,
        "seed": seed,
        "frames_per_point": frames,
        "L": L,
        "theta_row": theta_row,
        "jobs": [
            {k: (list(v) if isinstance(v, tuple) else v) for k, v in job.items()}
            for job in jobs
        ],
        "csv": os.path.basename(csv_path),
        "columns": CSV_COLUMNS,
        "bound_ordering_warnings": problems,
        "git_describe": _git_describe(),
    }
    manifest_path = os.path.join(out_dir, f"fig{slug}.manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return csv_path, manifest_path


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=10,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"
