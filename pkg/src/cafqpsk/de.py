"""Density evolution by Monte Carlo population dynamics.

Two engines: symmetric all-zero-codeword DE for output-symmetric channels
(AWGN, the SIC stage-1 mixture channel), and label-conditioned two-density
DE for the output-asymmetric degraded XOR channel. On top of those sit
threshold bisection and the ACPR grid scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import degraded_llr, degraded_pdf, sic_stage1_llr_function, sic_stage1_mixture
from .infotheory import IntegrationConfig, sir_caf, sir_sd
from .model import ChannelParams, params_from_snr

_TANH_CLIP = 1.0 - 1e-15


@dataclass(frozen=True)
class DeChannel:
    """Per-bit LLR sampler: sample_llr(rng, bit, n) -> LLR array."""

    sample_llr: Callable[[np.random.Generator, int, int], np.ndarray]
    symmetric: bool
    name: str


def biawgn_channel(sigma: float) -> DeChannel:
    def sample(rng, bit, n):
        s = 1.0 - 2.0 * bit
        y = s + rng.normal(scale=sigma, size=n)
        return 2.0 * y / sigma ** 2

    return DeChannel(sample, True, f"biawgn(sigma={sigma:g})")


def sic_stage1_channel(p: ChannelParams, theta_case: float) -> DeChannel:
    noise = sic_stage1_mixture(p, theta_case)
    llr = sic_stage1_llr_function(p, theta_case)

    def sample(rng, bit, n):
        s = (1.0 - 2.0 * bit) * p.h_a
        return llr(s + noise.sample(rng, n))

    return DeChannel(sample, True, f"sic_stage1(theta={theta_case:g})")


def awgn_channel(h: float, sigma: float) -> DeChannel:
    def sample(rng, bit, n):
        y = (1.0 - 2.0 * bit) * h + rng.normal(scale=sigma, size=n)
        return 2.0 * h * y / sigma ** 2

    return DeChannel(sample, True, f"awgn(h={h:g})")


def degraded_caf_channel(p: ChannelParams) -> DeChannel:
    dists = (degraded_pdf(0, p), degraded_pdf(1, p))

    def sample(rng, bit, n):
        return degraded_llr(dists[bit].sample(rng, n), p)

    return DeChannel(sample, False, "degraded_caf")


@dataclass
class DeOutcome:
    converged: bool
    error_prob_trace: list[float]
    iterations: int


@dataclass(frozen=True)
class DeConfig:
    n_pop: int = 200_000
    max_iter: int = 200
    target_error: float = 1e-6
    seed: int = 0
    stall_window: int = 20
    stall_rel_change: float = 1e-3


def _check_update(rng, pop: np.ndarray, dc: int, n_out: int) -> np.ndarray:
    idx = rng.integers(0, len(pop), size=(n_out, dc - 1))
    t = np.clip(np.tanh(0.5 * pop[idx]), -_TANH_CLIP, _TANH_CLIP)
    prod = t.prod(axis=1)
    return 2.0 * np.arctanh(np.clip(prod, -_TANH_CLIP, _TANH_CLIP))


def _error_prob(pop: np.ndarray) -> float:
    return float(np.mean(pop < 0) + 0.5 * np.mean(pop == 0))


def _stalled(trace: list[float], cfg: DeConfig) -> bool:
    w = cfg.stall_window
    if len(trace) <= w:
        return False
    old, new = trace[-w - 1], trace[-1]
    if new < cfg.target_error:
        return False
    return abs(old - new) < cfg.stall_rel_change * max(old, 1e-300)


def de_symmetric(dv: int, dc: int, channel: DeChannel, cfg: DeConfig) -> DeOutcome:
    """All-zero-codeword population DE for a symmetric channel."""
    if not channel.symmetric:
        raise ValueError(f"channel {channel.name} is not output-symmetric; "
                         "use de_two_density")
    if cfg.n_pop < 10_000:
        raise ValueError("population too small for a meaningful DE run")
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_pop
    v = channel.sample_llr(rng, 0, n)
    trace = [_error_prob(v)]
    for it in range(1, cfg.max_iter + 1):
        c = _check_update(rng, v, dc, n)
        fresh = channel.sample_llr(rng, 0, n)
        idx = rng.integers(0, n, size=(n, dv - 1))
        v = fresh + c[idx].sum(axis=1)
        trace.append(_error_prob(v))
        if trace[-1] < cfg.target_error:
            return DeOutcome(True, trace, it)
        if _stalled(trace, cfg):
            return DeOutcome(False, trace, it)
    return DeOutcome(False, trace, cfg.max_iter)


def _two_density_error(pop0: np.ndarray, pop1: np.ndarray) -> float:
    e0 = np.mean(pop0 < 0) + 0.5 * np.mean(pop0 == 0)
    e1 = np.mean(pop1 > 0) + 0.5 * np.mean(pop1 == 0)
    return float(0.5 * e0 + 0.5 * e1)


def de_two_density(dv: int, dc: int, channel: DeChannel, cfg: DeConfig) -> DeOutcome:
    """Label-conditioned DE for channels without output symmetry.

    Messages carry the code bit of their edge. Check outputs combine dc-1
    jointly sampled labeled messages (output label = XOR, even parity);
    variable outputs condition every incoming message on the variable's own
    bit. The error probability weights both labels equally.
    """
    if cfg.n_pop < 10_000:
        raise ValueError("population too small for a meaningful DE run")
    rng = np.random.default_rng(cfg.seed)
    half = cfg.n_pop // 2
    v = {b: channel.sample_llr(rng, b, half) for b in (0, 1)}
    trace = [_two_density_error(v[0], v[1])]
    for it in range(1, cfg.max_iter + 1):
        # joint sampling from the variable populations: labels i.i.d. uniform
        msgs = np.concatenate([v[0], v[1]])
        labels = np.concatenate([np.zeros(len(v[0]), dtype=np.int8),
                                 np.ones(len(v[1]), dtype=np.int8)])
        n_out = 2 * half
        idx = rng.integers(0, len(msgs), size=(n_out, dc - 1))
        t = np.clip(np.tanh(0.5 * msgs[idx]), -_TANH_CLIP, _TANH_CLIP)
        c_msgs = 2.0 * np.arctanh(np.clip(t.prod(axis=1), -_TANH_CLIP, _TANH_CLIP))
        c_labels = labels[idx].sum(axis=1) & 1

        c = {b: c_msgs[c_labels == b] for b in (0, 1)}
        if len(c[0]) == 0 or len(c[1]) == 0:
            raise RuntimeError("check population collapsed to one label")
        new_v = {}
        for b in (0, 1):
            fresh = channel.sample_llr(rng, b, half)
            pool = c[b]
            idx = rng.integers(0, len(pool), size=(half, dv - 1))
            new_v[b] = fresh + pool[idx].sum(axis=1)
        v = new_v
        trace.append(_two_density_error(v[0], v[1]))
        if trace[-1] < cfg.target_error:
            return DeOutcome(True, trace, it)
        if _stalled(trace, cfg):
            return DeOutcome(False, trace, it)
    return DeOutcome(False, trace, cfg.max_iter)


def decodable_caf(dv: int, dc: int, p: ChannelParams, cfg: DeConfig) -> bool:
    return de_two_density(dv, dc, degraded_caf_channel(p), cfg).converged


def decodable_sic(dv: int, dc: int, p: ChannelParams, theta_case: float,
                  order: str, cfg: DeConfig) -> bool:
    """DE verdict for SIC BP decoding with ideal stage-1 cancellation."""
    if order not in ("a_first", "b_first"):
        raise ValueError("order must be 'a_first' or 'b_first'")
    q = p if order == "a_first" else p.swapped()
    stage1 = de_symmetric(dv, dc, sic_stage1_channel(q, theta_case), cfg)
    if not stage1.converged:
        return False
    cfg2 = DeConfig(cfg.n_pop, cfg.max_iter, cfg.target_error,
                    cfg.seed + 1, cfg.stall_window, cfg.stall_rel_change)
    stage2 = de_symmetric(dv, dc, awgn_channel(q.h_b, q.sigma), cfg2)
    return stage2.converged


LDPC_SCHEMES = ("caf_ldpc", "sic_ldpc_theta0", "sic_ldpc_theta45")
LRC_SCHEMES = ("caf_lrc", "sd_lrc_theta0", "sd_lrc_theta45")


@dataclass
class AcprGrid:
    snr_a_values: np.ndarray
    snr_b_values: np.ndarray
    scheme: str
    rate: float
    decodable: np.ndarray  # bool, shape (len(a), len(b))
    status: np.ndarray     # object array of "ok" / error strings


def _point_seed(master: int, i: int, j: int) -> int:
    return (master * 1_000_003 + i * 7919 + j) % (2 ** 63)


def point_decodable(scheme: str, dv: int, dc: int, rate: float,
                    snr_a_db: float, snr_b_db: float,
                    de_cfg: DeConfig, mi_cfg: IntegrationConfig) -> bool:
    """Decodability verdict for a single (scheme, SNR_A, SNR_B) point."""
    p = params_from_snr(snr_a_db, snr_b_db)
    if scheme == "caf_ldpc":
        return decodable_caf(dv, dc, p, de_cfg)
    if scheme in ("sic_ldpc_theta0", "sic_ldpc_theta45"):
        theta = 0.0 if scheme.endswith("theta0") else np.pi / 4
        return (decodable_sic(dv, dc, p, theta, "a_first", de_cfg)
                or decodable_sic(dv, dc, p, theta, "b_first", de_cfg))
    if scheme == "caf_lrc":
        return sir_caf(p, mi_cfg).value >= 2.0 * rate
    if scheme in ("sd_lrc_theta0", "sd_lrc_theta45"):
        theta = 0.0 if scheme.endswith("theta0") else np.pi / 4
        q = params_from_snr(snr_a_db, snr_b_db, phi_a=theta)
        return sir_sd(q, mi_cfg).value >= 2.0 * rate
    raise ValueError(f"unknown scheme {scheme!r}")


def acpr_scan(scheme: str, dv: int, dc: int, snr_a_values, snr_b_values,
              de_cfg: DeConfig = DeConfig(),
              mi_cfg: IntegrationConfig = IntegrationConfig(method="quadrature"),
              rate: float | None = None) -> AcprGrid:
    """Scan decodability over an (SNR_A, SNR_B) dB grid.

    Per-point failures are recorded in `status` and the scan continues.
    """
    snr_a_values = np.asarray(snr_a_values, dtype=float)
    snr_b_values = np.asarray(snr_b_values, dtype=float)
    if np.any(np.diff(snr_a_values) <= 0) or np.any(np.diff(snr_b_values) <= 0):
        raise ValueError("grid axes must be strictly increasing")
    if rate is None:
        rate = 1.0 - dv / dc
    dec = np.zeros((len(snr_a_values), len(snr_b_values)), dtype=bool)
    status = np.full(dec.shape, "ok", dtype=object)
    for i, a in enumerate(snr_a_values):
        for j, b in enumerate(snr_b_values):
            cfg_ij = DeConfig(de_cfg.n_pop, de_cfg.max_iter, de_cfg.target_error,
                              _point_seed(de_cfg.seed, i, j),
                              de_cfg.stall_window, de_cfg.stall_rel_change)
            try:
                dec[i, j] = point_decodable(scheme, dv, dc, rate, a, b,
                                            cfg_ij, mi_cfg)
            except Exception as exc:  # mark and continue
                status[i, j] = f"error: {exc}"
    return AcprGrid(snr_a_values, snr_b_values, scheme, rate, dec, status)


def threshold_bisect(verdict: Callable[[float, int], bool],
                     lo: float, hi: float, tol: float, seed: int = 0) -> float:
    """Bisect a monotone decodability boundary along one scalar parameter.

    `verdict(param, seed)` must return the DE decision; verdicts at lo and
    hi must differ or the bracket is invalid.
    """
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise ValueError("invalid bracket")
    v_lo = verdict(lo, seed)
    v_hi = verdict(hi, seed + 1)
    if v_lo == v_hi:
        raise ValueError("bracket invalid: identical verdicts at both ends")
    k = 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if verdict(mid, seed + k) == v_lo:
            lo = mid
        else:
            hi = mid
        k += 1
    return 0.5 * (lo + hi)


def biawgn_threshold(dv: int, dc: int, lo: float = 0.5, hi: float = 1.2,
                     tol: float = 0.005, de_cfg: DeConfig = DeConfig()) -> float:
    """Sum-product noise threshold sigma* of a (dv, dc) ensemble on BIAWGN."""

    def verdict(sigma, seed):
        cfg = DeConfig(de_cfg.n_pop, de_cfg.max_iter, de_cfg.target_error,
                       seed, de_cfg.stall_window, de_cfg.stall_rel_change)
        return de_symmetric(dv, dc, biawgn_channel(sigma), cfg).converged

    return threshold_bisect(verdict, lo, hi, tol, seed=de_cfg.seed)


def caf_diagonal_crossover(dv: int, dc: int, lo_db: float = -2.0,
                           hi_db: float = 12.0, tol: float = 0.05,
                           de_cfg: DeConfig = DeConfig()) -> float:
    """Equal-power SNR (dB) above which CAF LDPC density evolution converges."""

    def verdict(snr_db, seed):
        cfg = DeConfig(de_cfg.n_pop, de_cfg.max_iter, de_cfg.target_error,
                       seed, de_cfg.stall_window, de_cfg.stall_rel_change)
        return decodable_caf(dv, dc, params_from_snr(snr_db, snr_db), cfg)

    return threshold_bisect(verdict, lo_db, hi_db, tol, seed=de_cfg.seed)
