"""Per-stream achievable rates of the triangularized NOMA link.

All rates are in bits per channel use. Rates use the squared magnitudes of
the triangular factors' entries; the diagonals are real and nonnegative by
construction, so no extra phase handling is needed.

A shared stream of user 1 must be decodable at both users (user 2 decodes it
for SIC), so its rate is the instantaneous minimum of the two decoding
points. User 2's shared streams see no interference after SIC.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RateBreakdown",
    "rate_user1_shared_at_user1",
    "rate_user1_shared_at_user2",
    "rate_user1",
    "rate_user2",
    "rate_breakdown",
    "weighted_sum_rate",
]


def rate_user1_shared_at_user1(alloc, dec, pathloss1, noise_power, l):
    """Rate of user 1's shared stream ``l`` (0-based) at user 1's decoder.

    The denominator keeps the uncancellable interference from user 2's
    shared symbols at indices >= l.
    """
    d = dec.dims
    if not 0 <= l < d.shared:
        raise ValueError(f"stream {l} is not shared")
    w = np.abs(dec.r1[l, l : d.shared]) ** 2
    signal = alloc.p1[l] * w[0] / pathloss1
    interference = (alloc.p2[l : d.shared] @ w) / pathloss1
    return float(np.log2(1.0 + signal / (noise_power + interference)))


def rate_user1_shared_at_user2(alloc, dec, pathloss2, noise_power, l):
    """Rate of user 1's shared stream ``l`` when decoded at user 2 (pre-SIC).

    Only the own-index symbol of user 2 interferes; everything else is
    cancelled by user 2's decoding recursion.
    """
    d = dec.dims
    if not 0 <= l < d.shared:
        raise ValueError(f"stream {l} is not shared")
    w = abs(dec.r2[l, l]) ** 2
    signal = alloc.p1[l] * w / pathloss2
    interference = alloc.p2[l] * w / pathloss2
    return float(np.log2(1.0 + signal / (noise_power + interference)))


def _snr_rate(power, gain_sq, pathloss, noise_power):
    return float(np.log2(1.0 + power * gain_sq / (pathloss * noise_power)))


def rate_user1(alloc, dec, cfg):
    """Per-stream rates of user 1, length L.

    Shared streams take the minimum of both decoding points; private streams
    of user 1 are interference-free; user 2's private indices carry zero.
    """
    d = dec.dims
    r = np.zeros(d.total)
    for l in d.shared_indices():
        r[l] = min(
            rate_user1_shared_at_user1(alloc, dec, cfg.pathloss1, cfg.noise_power, l),
            rate_user1_shared_at_user2(alloc, dec, cfg.pathloss2, cfg.noise_power, l),
        )
    for l in d.private1_indices():
        r[l] = _snr_rate(
            alloc.p1[l], abs(dec.r1[l, l]) ** 2, cfg.pathloss1, cfg.noise_power
        )
    return r


def rate_user2(alloc, dec, cfg):
    """Per-stream rates of user 2, length L.

    Shared streams are interference-free after SIC; private streams map to
    rows of ``r2`` shifted down by the private1 count; user 1's private
    indices carry zero.
    """
    d = dec.dims
    r = np.zeros(d.total)
    for l in d.shared_indices():
        r[l] = _snr_rate(
            alloc.p2[l], abs(dec.r2[l, l]) ** 2, cfg.pathloss2, cfg.noise_power
        )
    for l in d.private2_indices():
        row = l - d.private1
        r[l] = _snr_rate(
            alloc.p2[l], abs(dec.r2[row, row]) ** 2, cfg.pathloss2, cfg.noise_power
        )
    return r


@dataclass(frozen=True)
class RateBreakdown:
    """Per-stream rates plus the shared-stream intermediates of user 1."""

    r1: np.ndarray
    r2: np.ndarray
    r1_at_user1: np.ndarray
    r1_at_user2: np.ndarray

    @property
    def total1(self):
        return float(self.r1.sum())

    @property
    def total2(self):
        return float(self.r2.sum())


def rate_breakdown(alloc, dec, cfg):
    """Full rate picture of one allocation on one decomposition."""
    d = dec.dims
    at1 = np.array(
        [
            rate_user1_shared_at_user1(alloc, dec, cfg.pathloss1, cfg.noise_power, l)
            for l in d.shared_indices()
        ]
    )
    at2 = np.array(
        [
            rate_user1_shared_at_user2(alloc, dec, cfg.pathloss2, cfg.noise_power, l)
            for l in d.shared_indices()
        ]
    )
    return RateBreakdown(
        r1=rate_user1(alloc, dec, cfg),
        r2=rate_user2(alloc, dec, cfg),
        r1_at_user1=at1,
        r1_at_user2=at2,
    )


def weighted_sum_rate(alloc, dec, cfg, mu):
    """Weighted sum rate ``sum_l mu r1[l] + (1 - mu) r2[l]``, mu in [0, 1]."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    r1 = rate_user1(alloc, dec, cfg)
    r2 = rate_user2(alloc, dec, cfg)
    return float(mu * r1.sum() + (1.0 - mu) * r2.sum())
