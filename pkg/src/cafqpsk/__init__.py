"""Compute-and-forward vs. separation decoding on the two-user QPSK MAC."""

from .model import ChannelParams, params_from_snr

__all__ = ["ChannelParams", "params_from_snr"]
__version__ = "0.1.0"
