"""Infectivity laws, sampled infectivity trajectories, and per-trajectory integrals.

An infectivity law describes the random per-contact infection rate of one
infected individual as a function of its infection age.  Three parametric
families are supported:

- ``ConstantRate``: constant rate over a random infectious period (the
  classical SIR ingredient),
- ``ExposedConstantRate``: a latent period with zero rate, then a constant
  rate (the SEIR ingredient),
- ``TriangularRamp``: zero during the latent period, linear rise over a
  fixed ramp, then linear decline back to zero at recovery.

Every realized trajectory is piecewise linear, which lets all the integrals
used elsewhere (total mass, exponentially discounted mass, per-cell masses
on a uniform grid) be evaluated in closed form rather than by quadrature
in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

__all__ = [
    "Dirac",
    "Exponential",
    "Uniform",
    "DurationLaw",
    "ConstantRate",
    "ExposedConstantRate",
    "TriangularRamp",
    "InfectivityLaw",
    "ProfileDraw",
    "scale_law",
    "sample_profile",
]

# exp() saturation threshold; keeps bracketing searches finite and monotone
# instead of raising OverflowError deep in a root finder.
_EXP_MAX = 700.0


def _exp(x: float) -> float:
    return math.exp(min(x, _EXP_MAX))


def _phi1(x: float) -> float:
    """(1 - e^-x) / x, the order-1 exponential integrator kernel."""
    if x == 0.0:
        return 1.0
    if abs(x) < 1e-8:
        return 1.0 - x / 2.0 + x * x / 6.0
    return -math.expm1(-min(x, _EXP_MAX)) / x


def _phi2(x: float) -> float:
    """(1 - (1+x) e^-x) / x^2, the order-2 exponential integrator kernel."""
    if abs(x) < 1e-3:
        # alternating series sum_{j>=0} (-x)^j (j+1)/(j+2)!; six terms give
        # full double precision on |x| < 1e-3
        acc, term = 0.0, 0.5
        for j in range(6):
            acc += term
            term *= -x * (j + 2) / ((j + 1) * (j + 3))
        return acc
    x = min(x, _EXP_MAX)
    return (1.0 - (1.0 + x) * math.exp(-x)) / (x * x)


# --------------------------------------------------------------------------
# duration laws


@dataclass(frozen=True)
class Dirac:
    """Deterministic duration of ``value`` days."""

    value: float

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"Dirac duration must be >= 0, got {self.value}")

    def mean(self) -> float:
        return self.value

    def cdf(self, t):
        return np.where(np.asarray(t, dtype=float) >= self.value, 1.0, 0.0)

    def quantile(self, q: float) -> float:
        return self.value

    def sample(self, rng: np.random.Generator) -> float:
        return self.value

    @property
    def essential_min(self) -> float:
        return self.value


@dataclass(frozen=True)
class Exponential:
    """Exponential duration with the given rate (per day)."""

    rate: float

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError(f"Exponential rate must be > 0, got {self.rate}")

    def mean(self) -> float:
        return 1.0 / self.rate

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, -np.expm1(-self.rate * np.maximum(t, 0.0)), 0.0)

    def quantile(self, q: float) -> float:
        return -math.log1p(-q) / self.rate

    def sample(self, rng: np.random.Generator) -> float:
        return rng.exponential(1.0 / self.rate)

    @property
    def essential_min(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Uniform:
    """Uniform duration on [lo, hi] days."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0 <= self.lo < self.hi:
            raise ValueError(f"Uniform needs 0 <= lo < hi, got [{self.lo}, {self.hi}]")

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip((t - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def quantile(self, q: float) -> float:
        return self.lo + q * (self.hi - self.lo)

    def sample(self, rng: np.random.Generator) -> float:
        return rng.uniform(self.lo, self.hi)

    @property
    def essential_min(self) -> float:
        return self.lo


DurationLaw = Union[Dirac, Exponential, Uniform]


# --------------------------------------------------------------------------
# realized trajectories


@dataclass(frozen=True)
class ProfileDraw:
    """One realized piecewise-linear infectivity trajectory.

    Parameters
    ----------
    tau : float
        Latent (zero-rate) duration at the start of the trajectory, days.
    eta : float
        Duration of the remaining (potentially infectious) part, days.
    segments : tuple of (t0, t1, v0, v1)
        Ordered linear pieces tiling [0, lifetime); the rate at age
        ``t in [t0, t1)`` is the linear interpolation of ``v0 -> v1``.
        The rate is zero before age 0 and from the lifetime onward.
    """

    tau: float
    eta: float
    segments: tuple[tuple[float, float, float, float], ...]

    @property
    def lifetime(self) -> float:
        """Age at which the individual recovers: tau + eta."""
        return self.tau + self.eta

    def rate_at(self, t: float) -> float:
        """Rate at age ``t``; segments are left-closed/right-open."""
        if t < 0.0 or t >= self.lifetime:
            return 0.0
        for (t0, t1, v0, v1) in self.segments:
            if t0 <= t < t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return 0.0

    def rate_on(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`rate_at`."""
        ts = np.asarray(ts, dtype=float)
        out = np.zeros_like(ts)
        for (t0, t1, v0, v1) in self.segments:
            mask = (ts >= t0) & (ts < t1)
            if mask.any():
                out[mask] = v0 + (v1 - v0) * (ts[mask] - t0) / (t1 - t0)
        return out

    def total_infectivity(self) -> float:
        """Exact integral of the rate over all ages (trapezoid per segment)."""
        return sum((t1 - t0) * (v0 + v1) * 0.5 for (t0, t1, v0, v1) in self.segments)

    def cumulative_on(self, ts: np.ndarray) -> np.ndarray:
        """Exact integral of the rate from age 0 to each entry of ``ts``."""
        ts = np.asarray(ts, dtype=float)
        out = np.zeros_like(ts)
        for (t0, t1, v0, v1) in self.segments:
            tc = np.clip(ts, t0, t1) - t0
            slope = (v1 - v0) / (t1 - t0)
            out += v0 * tc + 0.5 * slope * tc * tc
        return out

    def laplace(self, rho: float) -> float:
        """Exact integral of ``exp(-rho t)`` times the rate over all ages.

        Uses the closed-form antiderivative of exponential-times-linear on
        each segment, so the value is exact for any ``rho`` (negative
        included) and reduces to :meth:`total_infectivity` at ``rho = 0``.
        """
        acc = 0.0
        for (t0, t1, v0, v1) in self.segments:
            d = t1 - t0
            if d <= 0.0 or (v0 == 0.0 and v1 == 0.0):
                continue
            x = rho * d
            acc += _exp(-rho * t0) * d * (v0 * _phi1(x) + (v1 - v0) * _phi2(x))
        return acc

    def shifted(self, offset: float) -> "ProfileDraw":
        """Trajectory seen from age ``offset``: truncate and shift left.

        The returned draw has lifetime ``lifetime - offset`` and rate
        ``t -> rate_at(t + offset)``.
        """
        if not 0.0 <= offset <= self.lifetime:
            raise ValueError(f"offset must lie in [0, {self.lifetime}], got {offset}")
        new_life = self.lifetime - offset
        segs = []
        for (t0, t1, v0, v1) in self.segments:
            a, b = max(t0, offset), t1
            if b <= a:
                continue
            slope = (v1 - v0) / (t1 - t0)
            va = v0 + slope * (a - t0)
            segs.append((a - offset, b - offset, va, v1))
        new_tau = max(self.tau - offset, 0.0)
        return ProfileDraw(tau=new_tau, eta=new_life - new_tau, segments=tuple(segs))


# --------------------------------------------------------------------------
# infectivity laws


def _check_fraction(s: float) -> None:
    if not 0.0 < s <= 1.0:
        raise ValueError(f"susceptible_fraction must lie in (0, 1], got {s}")


@dataclass(frozen=True)
class ConstantRate:
    """Constant rate ``lam`` over a random infectious period ``eta``."""

    lam: float
    eta: DurationLaw
    susceptible_fraction: float = 1.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"rate must be >= 0, got {self.lam}")
        _check_fraction(self.susceptible_fraction)

    @property
    def rate_bound(self) -> float:
        """Uniform bound on the scaled rate."""
        return self.susceptible_fraction * self.lam

    def duration_axes(self) -> tuple[tuple[str, DurationLaw], ...]:
        return (("eta", self.eta),)

    def profile_from(self, eta: float) -> ProfileDraw:
        v = self.rate_bound
        if eta <= 0.0:
            return ProfileDraw(tau=0.0, eta=0.0, segments=())
        return ProfileDraw(tau=0.0, eta=eta, segments=((0.0, eta, v, v),))


@dataclass(frozen=True)
class ExposedConstantRate:
    """Zero rate during a latent period ``xi``, then constant ``lam`` for ``eta``."""

    lam: float
    xi: DurationLaw
    eta: DurationLaw
    susceptible_fraction: float = 1.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"rate must be >= 0, got {self.lam}")
        _check_fraction(self.susceptible_fraction)

    @property
    def rate_bound(self) -> float:
        return self.susceptible_fraction * self.lam

    def duration_axes(self) -> tuple[tuple[str, DurationLaw], ...]:
        return (("xi", self.xi), ("eta", self.eta))

    def profile_from(self, xi: float, eta: float) -> ProfileDraw:
        v = self.rate_bound
        segs = []
        if xi > 0.0:
            segs.append((0.0, xi, 0.0, 0.0))
        if eta > 0.0:
            segs.append((xi, xi + eta, v, v))
        return ProfileDraw(tau=xi, eta=eta, segments=tuple(segs))


@dataclass(frozen=True)
class TriangularRamp:
    """Latent period ``tau``, linear rise to ``peak_a`` over ``ramp`` days,
    then linear decline to zero at recovery age ``tau + eta``.

    The infectious duration ``eta`` must exceed ``ramp`` almost surely
    (the declining piece has slope ``peak_a / (eta - ramp)``), which rules
    out Exponential ``eta`` and requires ``lo > ramp`` (Uniform) or
    ``value > ramp`` (Dirac).
    """

    peak_a: float
    tau: DurationLaw
    eta: DurationLaw
    ramp: float = 1.5
    susceptible_fraction: float = 1.0

    def __post_init__(self) -> None:
        if self.peak_a < 0:
            raise ValueError(f"peak rate must be >= 0, got {self.peak_a}")
        if self.ramp <= 0:
            raise ValueError(f"ramp must be > 0, got {self.ramp}")
        _check_fraction(self.susceptible_fraction)
        if self.eta.essential_min <= self.ramp:
            raise ValueError(
                "TriangularRamp needs the infectious duration to exceed the "
                f"ramp ({self.ramp} days) almost surely; got {self.eta}"
            )

    @property
    def rate_bound(self) -> float:
        return self.susceptible_fraction * self.peak_a

    def duration_axes(self) -> tuple[tuple[str, DurationLaw], ...]:
        return (("tau", self.tau), ("eta", self.eta))

    def profile_from(self, tau: float, eta: float) -> ProfileDraw:
        peak = self.rate_bound
        segs = []
        if tau > 0.0:
            segs.append((0.0, tau, 0.0, 0.0))
        segs.append((tau, tau + self.ramp, 0.0, peak))
        segs.append((tau + self.ramp, tau + eta, peak, 0.0))
        return ProfileDraw(tau=tau, eta=eta, segments=tuple(segs))


InfectivityLaw = Union[ConstantRate, ExposedConstantRate, TriangularRamp]


def scale_law(law: InfectivityLaw, s_bar: float) -> InfectivityLaw:
    """Return ``law`` with its susceptible fraction replaced by ``s_bar``.

    Every subsequently drawn rate is multiplied by ``s_bar`` instead of the
    previous fraction.
    """
    _check_fraction(s_bar)
    return replace(law, susceptible_fraction=s_bar)


def sample_profile(law: InfectivityLaw, rng: np.random.Generator) -> ProfileDraw:
    """Draw one trajectory from ``law``: sample each duration, then build
    the deterministic profile for those durations."""
    durations = {name: dlaw.sample(rng) for name, dlaw in law.duration_axes()}
    return law.profile_from(**durations)
