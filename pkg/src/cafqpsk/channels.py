"""Conditional PDFs and LLR functions for every channel model in the system.

Channels covered: the degraded XOR channel used by the CAF decoder, the SIC
stage-1 channel (interference as noise) at theta in {0, pi/4}, the clean AWGN
stage-2 channel, and the complex-domain marginal mixtures behind all mutual
information integrals.

LLR sign convention (project-wide): positive LLR means bit 0 is more likely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .model import ALL_BIT_PAIRS, BitPair, ChannelParams, qpsk_modulate

_LOG_2PI = np.log(2.0 * np.pi)
_THETA_TOL = 1e-9


@dataclass(frozen=True)
class GaussianMixture1D:
    """Weighted mixture of real Gaussians."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        m = np.atleast_1d(np.asarray(self.means, dtype=float))
        v = np.atleast_1d(np.asarray(self.variances, dtype=float))
        if not (w.shape == m.shape == v.shape) or w.size == 0:
            raise ValueError("component arrays must be non-empty and congruent")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if np.any(v <= 0):
            raise ValueError("variances must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)

    def logpdf(self, y):
        y = np.asarray(y, dtype=float)
        d = y[..., None] - self.means
        comp = (np.log(self.weights) - 0.5 * _LOG_2PI
                - 0.5 * np.log(self.variances) - 0.5 * d * d / self.variances)
        return logsumexp(comp, axis=-1)

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def merged(self) -> "GaussianMixture1D":
        """Combine components with identical (mean, variance)."""
        keys = {}
        for w, m, v in zip(self.weights, self.means, self.variances):
            keys[(m, v)] = keys.get((m, v), 0.0) + w
        ms, vs = zip(*keys.keys())
        return GaussianMixture1D(np.array(list(keys.values())),
                                 np.array(ms), np.array(vs))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.choice(len(self.weights), size=size, p=self.weights)
        return rng.normal(self.means[idx], np.sqrt(self.variances[idx]))


@dataclass(frozen=True)
class GaussianMixture2D:
    """Weighted mixture of isotropic complex Gaussians.

    `variances` holds the total variance per complex symbol (half of it in
    each quadrature).
    """

    weights: np.ndarray
    means: np.ndarray  # complex
    variances: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        m = np.atleast_1d(np.asarray(self.means, dtype=complex))
        v = np.atleast_1d(np.asarray(self.variances, dtype=float))
        if not (w.shape == m.shape == v.shape) or w.size == 0:
            raise ValueError("component arrays must be non-empty and congruent")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if np.any(v <= 0):
            raise ValueError("variances must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)

    def logpdf(self, y):
        """Log density at complex points y (density of a complex Gaussian
        with total variance v: exp(-|y-m|^2/v) / (pi v))."""
        y = np.asarray(y, dtype=complex)
        d = y[..., None] - self.means
        comp = (np.log(self.weights) - np.log(np.pi * self.variances)
                - (d.real ** 2 + d.imag ** 2) / self.variances)
        return logsumexp(comp, axis=-1)

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.choice(len(self.weights), size=size, p=self.weights)
        s = np.sqrt(self.variances[idx] / 2.0)
        return self.means[idx] + rng.normal(scale=s) + 1j * rng.normal(scale=s)


@dataclass(frozen=True)
class LlrFunction:
    """LLR derived from a pair of conditional output mixtures.

    Evaluates ln p(y|0) - ln p(y|1); positive favors bit 0.
    """

    dist0: GaussianMixture1D
    dist1: GaussianMixture1D

    def __call__(self, y):
        return self.dist0.logpdf(y) - self.dist1.logpdf(y)


def _require_theta_zero(p: ChannelParams, what: str):
    th = p.theta
    if min(th, np.pi / 2 - th) > _THETA_TOL:
        raise ValueError(f"{what} is defined for theta=0 only (got theta={th:.6g})")


def degraded_pdf(z: int, p: ChannelParams) -> GaussianMixture1D:
    """Conditional PDF of the real-domain output given the XOR bit z.

    Two equally weighted Gaussians at +-(h_a + (-1)^z h_b), variance sigma^2.
    Defined in the real-decomposed domain with theta = 0.
    """
    if z not in (0, 1):
        raise ValueError("z must be a bit")
    _require_theta_zero(p, "the degraded channel")
    mu = p.h_a + (-1.0) ** z * p.h_b
    return GaussianMixture1D(np.array([0.5, 0.5]),
                             np.array([mu, -mu]),
                             np.array([p.sigma ** 2, p.sigma ** 2]))


def _logcosh(a):
    a = np.abs(np.asarray(a, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)


def degraded_llr(y, p: ChannelParams):
    """Symbol LLR of the XOR bit from the degraded channel.

    ln[cosh(y(h_a+h_b)/s^2) / cosh(y(h_a-h_b)/s^2)] - 2 h_a h_b / s^2,
    computed through log-cosh to stay finite for large |y|.
    """
    _require_theta_zero(p, "the degraded LLR")
    s2 = p.sigma ** 2
    y = np.asarray(y, dtype=float)
    return (_logcosh(y * (p.h_a + p.h_b) / s2)
            - _logcosh(y * (p.h_a - p.h_b) / s2)
            - 2.0 * p.h_a * p.h_b / s2)


def sic_stage1_mixture(p: ChannelParams, theta_case: float) -> GaussianMixture1D:
    """Interference-plus-noise distribution seen by the SIC stage-1 decoder.

    The interferer has amplitude h_b. theta_case must be 0 or pi/4.
    """
    s2 = p.sigma ** 2
    if abs(theta_case) <= _THETA_TOL:
        mix = GaussianMixture1D(np.array([0.5, 0.5]),
                                np.array([p.h_b, -p.h_b]),
                                np.array([s2, s2]))
    elif abs(theta_case - np.pi / 4) <= _THETA_TOL:
        r = np.sqrt(2.0) * p.h_b
        mix = GaussianMixture1D(np.array([0.25, 0.5, 0.25]),
                                np.array([r, 0.0, -r]),
                                np.array([s2, s2, s2]))
    else:
        raise ValueError("theta_case must be 0 or pi/4")
    return mix.merged()


def sic_stage1_llr_function(p: ChannelParams, theta_case: float) -> LlrFunction:
    """LLR function of the stage-1 binary channel y = +-h_a + w'."""
    noise = sic_stage1_mixture(p, theta_case)
    d0 = GaussianMixture1D(noise.weights, p.h_a + noise.means, noise.variances)
    d1 = GaussianMixture1D(noise.weights, -p.h_a + noise.means, noise.variances)
    return LlrFunction(d0.merged(), d1.merged())


def sic_stage1_llr(y, p: ChannelParams, theta_case: float):
    return sic_stage1_llr_function(p, theta_case)(y)


def awgn_llr(y, h: float, sigma: float):
    """BPSK-over-AWGN LLR, 2 h y / sigma^2."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 2.0 * h * np.asarray(y, dtype=float) / sigma ** 2


def joint_marginal_mixture(bits: BitPair | None, p: ChannelParams) -> GaussianMixture2D:
    """Complex-domain output mixture of the two-user MAC.

    With `bits` given, user A's bit pair is fixed and B is marginalized
    (4 components); with None, both users are marginalized (16 components,
    uniform weights).
    """
    a_pairs = [bits] if bits is not None else list(ALL_BIT_PAIRS)
    means = []
    for a in a_pairs:
        sa = p.h_a * qpsk_modulate(a, p.phi_a)
        for b in ALL_BIT_PAIRS:
            means.append(sa + p.h_b * qpsk_modulate(b, p.phi_b))
    n = len(means)
    return GaussianMixture2D(np.full(n, 1.0 / n), np.array(means),
                             np.full(n, p.sigma ** 2))


def conditional_mixture(pairs: list[tuple[BitPair, BitPair]], p: ChannelParams) -> GaussianMixture2D:
    """Output mixture conditioned on a uniform set of (A-pair, B-pair) combos."""
    means = [p.h_a * qpsk_modulate(a, p.phi_a) + p.h_b * qpsk_modulate(b, p.phi_b)
             for a, b in pairs]
    n = len(means)
    return GaussianMixture2D(np.full(n, 1.0 / n), np.array(means),
                             np.full(n, p.sigma ** 2))
