"""Closed-form regret ceilings for the PEGE family.

These are evaluated by experiments and tests with privileged knowledge of
the instance (gaps); learners never call them.
"""

from __future__ import annotations

import logging
import math

log = logging.getLogger(__name__)

E2 = math.e**2


def _positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")


def theorem1_bound(T, R, beta_sigma, sigma_size, Rmax):
    """Distribution-free ceiling for the (log, 1/2, 0) preset."""
    _positive(T=T, R=R, beta_sigma=beta_sigma, sigma_size=sigma_size, Rmax=Rmax)
    t23 = T ** (2 / 3)
    return Rmax * sigma_size * t23 + 2 * R * beta_sigma * t23 * math.sqrt(math.log(2 * E2) + 2 * math.log(T)) + Rmax


def theorem2_bound(T, R, beta_sigma, gap, gap_max, sigma_gaps, h):
    """Polylog ceiling for the (h*a, 1, 1) preset; ``sigma_gaps`` are the
    gaps of the actions in sigma."""
    _positive(T=T, R=R, beta_sigma=beta_sigma, gap=gap, h=h)
    explore = sum(sigma_gaps) * (math.log(T) / h) ** 2
    exploit = (4 * math.sqrt(2 * math.pi) * E2 * R * gap_max * beta_sigma / gap
               * math.exp(2 * h * h * R * R * beta_sigma**2 / gap**2))
    return explore + exploit


def theorem5_h_limit(gap, R, beta_sigma):
    """Largest admissible h (exclusive) for the (h*a, 1, 0) preset."""
    return gap**2 / (4 * R * R * beta_sigma**2)


def check_theorem5_precondition(h, gap, R, beta_sigma) -> bool:
    """Log a warning when h falls outside (0, gap^2 / (4 R^2 beta^2))."""
    limit = theorem5_h_limit(gap, R, beta_sigma)
    if not 0 < h < limit:
        log.warning(
            "h = %.6g violates 0 < h < Delta^2/(4 R^2 beta_sigma^2) = %.6g; "
            "the logarithmic regret bound does not apply", h, limit)
        return False
    return True


def theorem5_bound(T, R, beta_sigma, gap, gap_max, sigma_gaps, h):
    _positive(T=T, gap=gap, h=h)
    limit = theorem5_h_limit(gap, R, beta_sigma)
    if h >= limit:
        return math.inf
    return sum(sigma_gaps) * math.log(T) / h + 2 * E2 * gap_max / (limit - h)


def regret_bound_B1(T, R, beta_sigma, sigma_size, Rmax):
    """PEGE2 ceiling without a unique optimum."""
    _positive(T=T, R=R, beta_sigma=beta_sigma, sigma_size=sigma_size, Rmax=Rmax)
    core = 2 * R * beta_sigma * sigma_size**2 * Rmax**2 * T
    return 2 * core ** (2 / 3) * math.sqrt(math.log(4 * E2 * T**3)) + Rmax


def regret_bound_B2(T, R, beta_sigma, gap, sigma_gaps, Rmax, sigma_size=None):
    """PEGE2 ceiling under a unique optimum with T1(delta) < T0."""
    _positive(T=T, R=R, beta_sigma=beta_sigma, gap=gap, Rmax=Rmax)
    sigma_gaps = list(sigma_gaps)
    size = len(sigma_gaps) if sigma_size is None else sigma_size
    c = R * R * beta_sigma**2 / gap**2
    return (256 * c * math.log(512 * E2 * c * T) * Rmax * size
            + sum(sigma_gaps) * 36 * c * math.log(T)
            + 8 * E2 * c
            + Rmax)
