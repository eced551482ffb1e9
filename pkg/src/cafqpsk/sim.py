"""Finite-length Monte Carlo validation of the DE predictions.

End-to-end CAF and SIC trials over the actual channel, with FER/BER
estimation and Wilson confidence intervals. Trials derive their seeds from
(master seed, trial index), so reports replay exactly and aggregation is
order-independent.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import awgn_llr, degraded_llr, sic_stage1_llr_function
from .ldpc import LdpcCode, bp_decode, encode
from .model import SQRT2, ChannelParams, bipolar

_Z975 = 1.959963984540054


@dataclass(frozen=True)
class TrialConfig:
    scheme: str  # caf | sic_theta0 | sic_theta45
    code: LdpcCode
    params: ChannelParams
    max_iter: int = 100
    max_trials: int = 1_000_000
    min_block_errors: int = 100
    seed: int = 0
    sic_order: str = "a_first"

    def __post_init__(self):
        if self.scheme not in ("caf", "sic_theta0", "sic_theta45"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.max_trials <= 0 or self.min_block_errors <= 0:
            raise ValueError("budgets must be positive")
        if self.sic_order not in ("a_first", "b_first"):
            raise ValueError("sic_order must be 'a_first' or 'b_first'")


@dataclass
class SimReport:
    trials: int
    block_errors: int
    bit_errors: int
    fer: float
    ber: float
    fer_lo: float
    fer_hi: float
    mean_iterations: float


def wilson_interval(errors: int, trials: int, z: float = _Z975) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials ** 2)) / denom
    lo = 0.0 if errors == 0 else max(0.0, float(center - half))
    hi = 1.0 if errors == trials else min(1.0, float(center + half))
    return (lo, hi)


def run_caf_trial(code: LdpcCode, p: ChannelParams, rng: np.random.Generator,
                  max_iter: int = 100) -> tuple[bool, int, int]:
    """One CAF trial; returns (success, bit errors, BP iterations)."""
    xa = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
    xb = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
    z = xa ^ xb
    y = (p.h_a * bipolar(xa) + p.h_b * bipolar(xb)
         + rng.normal(scale=p.sigma, size=code.n))
    res = bp_decode(code, degraded_llr(y, p), max_iter)
    errs = int((res.hard_bits != z).sum())
    return errs == 0, errs, res.iterations_used


def _interferer_real_signal(bits: np.ndarray, h: float, theta_case: float) -> np.ndarray:
    """Real-pair-domain contribution of the second user's codeword."""
    if theta_case == 0.0:
        return h * bipolar(bits)
    # theta = pi/4: pairs of bits map to rotated QPSK projections
    b = bipolar(bits).reshape(-1, 2)
    out = np.empty_like(b)
    out[:, 0] = (b[:, 0] - b[:, 1]) / SQRT2
    out[:, 1] = (b[:, 0] + b[:, 1]) / SQRT2
    return h * out.ravel()


def _derotate_residual(residual: np.ndarray) -> np.ndarray:
    """Undo the pi/4 rotation of the second user (real-pair domain)."""
    r = residual.reshape(-1, 2)
    out = np.empty_like(r)
    c = 1.0 / SQRT2
    out[:, 0] = c * (r[:, 0] + r[:, 1])
    out[:, 1] = c * (-r[:, 0] + r[:, 1])
    return out.ravel()


def run_sic_trial(code_a: LdpcCode, code_b: LdpcCode, p: ChannelParams,
                  theta_case: float, order: str, rng: np.random.Generator,
                  max_iter: int = 100, genie: bool = False
                  ) -> tuple[bool, bool, int, int]:
    """One SIC trial; returns (success_first, success_second, bit errs, iters).

    Cancellation uses the decoded stage-1 word unless genie=True. order
    selects which user is decoded first; the first-decoded user always has
    rotation angle 0 and the other theta_case.
    """
    q = p if order == "a_first" else p.swapped()
    c1 = code_a if order == "a_first" else code_b
    c2 = code_b if order == "a_first" else code_a
    if theta_case == np.pi / 4 and c2.n % 2:
        raise ValueError("pi/4 interferer requires an even blocklength")
    x1 = encode(c1, rng.integers(0, 2, c1.k).astype(np.uint8))
    x2 = encode(c2, rng.integers(0, 2, c2.k).astype(np.uint8))
    s2 = _interferer_real_signal(x2, q.h_b, theta_case)
    y = q.h_a * bipolar(x1) + s2 + rng.normal(scale=q.sigma, size=c1.n)

    llr1 = sic_stage1_llr_function(q, theta_case)(y)
    res1 = bp_decode(c1, llr1, max_iter)
    ok1 = bool((res1.hard_bits == x1).all())

    cancel = x1 if genie else res1.hard_bits
    residual = y - q.h_a * bipolar(cancel)
    if theta_case == np.pi / 4:
        residual = _derotate_residual(residual)
    res2 = bp_decode(c2, awgn_llr(residual, q.h_b, q.sigma), max_iter)
    ok2 = bool((res2.hard_bits == x2).all())
    bit_errs = int((res1.hard_bits != x1).sum() + (res2.hard_bits != x2).sum())
    iters = res1.iterations_used + res2.iterations_used
    return ok1, ok2, bit_errs, iters


def _one_trial(cfg: TrialConfig, trial_idx: int) -> tuple[bool, int, int]:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial_idx]))
    if cfg.scheme == "caf":
        return run_caf_trial(cfg.code, cfg.params, rng, cfg.max_iter)
    theta = 0.0 if cfg.scheme == "sic_theta0" else np.pi / 4
    ok1, ok2, errs, iters = run_sic_trial(cfg.code, cfg.code, cfg.params,
                                          theta, cfg.sic_order, rng, cfg.max_iter)
    return ok1 and ok2, errs, iters


def _trial_batch(cfg: TrialConfig, indices: list[int]) -> list[tuple[bool, int, int]]:
    return [_one_trial(cfg, i) for i in indices]


def estimate_error_rate(cfg: TrialConfig, threads: int = 1) -> SimReport:
    """Run trials until the block-error target or the trial budget is hit."""
    trials = 0
    block_errors = 0
    bit_errors = 0
    iter_sum = 0
    batch = 64  # fixed so the processed trial set is thread-count independent
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while trials < cfg.max_trials and block_errors < cfg.min_block_errors:
            size = min(batch, cfg.max_trials - trials)
            indices = list(range(trials, trials + size))
            if pool is None:
                results = _trial_batch(cfg, indices)
            else:
                chunks = [indices[i::threads] for i in range(threads)]
                results = []
                for fut in [pool.submit(_trial_batch, cfg, ch) for ch in chunks if ch]:
                    results.extend(fut.result())
            for success, errs, iters in results:
                trials += 1
                block_errors += int(not success)
                bit_errors += errs
                iter_sum += iters
    finally:
        if pool is not None:
            pool.shutdown()
    fer = block_errors / trials if trials else 0.0
    ber = bit_errors / (trials * cfg.code.n) if trials else 0.0
    lo, hi = wilson_interval(block_errors, trials)
    return SimReport(trials, block_errors, bit_errors, fer, ber, lo, hi,
                     iter_sum / trials if trials else 0.0)
