"""Core signal model: channel parameters, QPSK modulation and SNR conversions.

Conventions used everywhere in this package:
  * complex-domain noise has total variance sigma^2 (sigma^2/2 per quadrature)
  * the real-pair decomposition y -> (sqrt(2) Re y, sqrt(2) Im y) therefore
    carries noise of variance sigma^2 per real symbol
  * the rotation-angle difference theta is reduced modulo pi/2 (QPSK
    relabeling symmetry) before any computation
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HALF_PI = np.pi / 2.0
SQRT2 = np.sqrt(2.0)

BitPair = tuple[int, int]


def reduce_theta(theta: float) -> float:
    """Reduce a rotation-angle difference to [0, pi/2) using QPSK symmetry."""
    return float(theta % HALF_PI)


@dataclass(frozen=True)
class ChannelParams:
    """Two-user Gaussian MAC parameters.

    h_a, h_b are linear reception amplitudes, sigma is the noise standard
    deviation per real dimension (see module docstring), phi_a/phi_b the
    constellation rotation angles in radians.
    """

    h_a: float
    h_b: float
    sigma: float
    phi_a: float = 0.0
    phi_b: float = 0.0

    def __post_init__(self):
        if self.h_a < 0 or self.h_b < 0:
            raise ValueError("amplitudes must be non-negative")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not (np.isfinite(self.phi_a) and np.isfinite(self.phi_b)):
            raise ValueError("rotation angles must be finite")

    @property
    def theta(self) -> float:
        return reduce_theta(self.phi_a - self.phi_b)

    def swapped(self) -> "ChannelParams":
        """Exchange the roles of users A and B."""
        return ChannelParams(self.h_b, self.h_a, self.sigma, self.phi_b, self.phi_a)

    def snr_a_db(self) -> float:
        return amplitude_to_snr_db(self.h_a, self.sigma)

    def snr_b_db(self) -> float:
        return amplitude_to_snr_db(self.h_b, self.sigma)


def bipolar(x):
    """Binary-bipolar conversion: 0 -> +1, 1 -> -1. Accepts arrays."""
    return 1.0 - 2.0 * np.asarray(x, dtype=float)


def qpsk_modulate(bits: BitPair, phi: float) -> complex:
    """Map a bit pair onto the unit-energy QPSK constellation rotated by phi."""
    b1, b2 = bits
    return complex(np.exp(1j * phi) * ((1 - 2 * b1) + 1j * (1 - 2 * b2)) / SQRT2)


def complex_to_real_pair(y: complex) -> tuple[float, float]:
    """Split a complex sample into the two real-domain symbols it carries."""
    return (SQRT2 * y.real, SQRT2 * y.imag)


def real_pair_to_complex(a: float, b: float) -> complex:
    return complex(a + 1j * b) / SQRT2


def snr_db_to_amplitude(snr_db: float, sigma: float) -> float:
    """Amplitude h with 10 log10(h^2/sigma^2) = snr_db."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return sigma * 10.0 ** (snr_db / 20.0)


def amplitude_to_snr_db(h: float, sigma: float) -> float:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if h <= 0:
        return -np.inf
    return 20.0 * np.log10(h / sigma)


def params_from_snr(snr_a_db: float, snr_b_db: float, sigma: float = 1.0,
                    phi_a: float = 0.0, phi_b: float = 0.0) -> ChannelParams:
    """Build ChannelParams from per-user SNRs at a fixed noise level."""
    return ChannelParams(
        h_a=snr_db_to_amplitude(snr_a_db, sigma),
        h_b=snr_db_to_amplitude(snr_b_db, sigma),
        sigma=sigma,
        phi_a=phi_a,
        phi_b=phi_b,
    )


def sample_mac_output(xa: BitPair, xb: BitPair, p: ChannelParams,
                      rng: np.random.Generator) -> complex:
    """Draw one noisy relay observation for the given transmitted bit pairs."""
    signal = p.h_a * qpsk_modulate(xa, p.phi_a) + p.h_b * qpsk_modulate(xb, p.phi_b)
    noise_scale = p.sigma / SQRT2  # sigma^2/2 per quadrature
    w = rng.normal(scale=noise_scale) + 1j * rng.normal(scale=noise_scale)
    return signal + w


ALL_BIT_PAIRS: tuple[BitPair, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))
