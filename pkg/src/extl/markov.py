"""Closed-form benchmark: the linear birth-death (Markov SIR) branching process.

Individuals live Exp(mu) and give birth at constant rate lambda_hat; in the
subcritical regime the extinction-time distribution, generating function and
mean are explicit.  Everything here is parameterized by the comparison axis
used throughout: the pair (r_eff, rho) with r_eff = lambda_hat / mu and
rho = lambda_hat - mu.
"""

from __future__ import annotations

import numpy as np

__all__ = ["sir_cdf", "sir_pgf", "sir_mean"]


def _check_subcritical(r_eff: float, rho: float) -> None:
    if not 0.0 < r_eff < 1.0:
        raise ValueError(f"need 0 < r_eff < 1, got {r_eff}")
    if rho >= 0.0:
        raise ValueError(f"need rho < 0, got {rho}")


def sir_cdf(r_eff: float, rho: float, t):
    """Extinction-time distribution function (1 - e^{rho t}) / (1 - r_eff e^{rho t})."""
    _check_subcritical(r_eff, rho)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    e = np.exp(rho * t)
    out = (1.0 - e) / (1.0 - r_eff * e)
    return float(out) if out.ndim == 0 else out


def sir_pgf(lambda_hat: float, mu: float, s: float, t):
    """Generating function E[s^{Z_t}] of the population at time t.

    Requires the subcritical ordering mu > lambda_hat; at s = 0 this equals
    :func:`sir_cdf` with r_eff = lambda_hat / mu, rho = lambda_hat - mu.
    """
    if lambda_hat < 0 or mu <= 0:
        raise ValueError("need lambda_hat >= 0 and mu > 0")
    if mu <= lambda_hat:
        raise ValueError(f"need mu > lambda_hat (subcritical), got {mu} <= {lambda_hat}")
    if abs(s) > 1:
        raise ValueError(f"|s| must be <= 1, got {s}")
    rho = lambda_hat - mu
    t = np.asarray(t, dtype=float)
    e = np.exp(-rho * t)
    num = mu * (s - 1.0) - e * (lambda_hat * s - mu)
    den = lambda_hat * (s - 1.0) - e * (lambda_hat * s - mu)
    out = num / den
    return float(out) if out.ndim == 0 else out


def sir_mean(r_eff: float, rho: float) -> float:
    """Mean extinction time (1 - r_eff) ln(1 - r_eff) / (rho r_eff)."""
    _check_subcritical(r_eff, rho)
    return (1.0 - r_eff) * np.log1p(-r_eff) / (rho * r_eff)
