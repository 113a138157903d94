"""Effective reproduction number, exponential decay rate, and Markov matching.

The decay rate is the unique root of ``E[integral e^{-rho t} rate(t) dt] = 1``
(negative in the subcritical regime).  The map is strictly decreasing in
``rho``, so a bracketed bisection is robust; the bracket is expanded
geometrically toward the divergence boundary of the law (finite only when
an Exponential duration is involved).
"""

from __future__ import annotations

from dataclasses import dataclass

from .profiles import Exponential, InfectivityLaw, TriangularRamp
from .quadrature import QuadratureSpec, law_nodes

__all__ = [
    "EpidemicCharacteristics",
    "NoFiniteRootError",
    "effective_reproduction_number",
    "mean_laplace",
    "decay_rate",
    "divergence_boundary",
    "match_markov",
    "calibrate_peak",
    "compute_characteristics",
]

_MAX_EXPANSIONS = 60
_MAX_BISECTIONS = 200


class NoFiniteRootError(RuntimeError):
    """No finite decay rate exists down to the law's divergence boundary."""

    def __init__(self, boundary: float):
        self.boundary = boundary
        super().__init__(
            "no finite decay rate: the mean discounted infectivity never "
            f"reaches 1 before the integral diverges at rho = {boundary}"
        )


@dataclass(frozen=True)
class EpidemicCharacteristics:
    """Reproduction number / decay-rate pair for a scaled infectivity law."""

    r_eff: float
    rho: float
    s_bar: float
    lambda_hat_star: float

    def __post_init__(self) -> None:
        if self.r_eff <= 0:
            raise ValueError(f"r_eff must be > 0, got {self.r_eff}")
        if (self.r_eff - 1.0) * self.rho < 0:
            raise ValueError(
                f"sign mismatch: r_eff = {self.r_eff} implies rho with sign "
                f"{1 if self.r_eff > 1 else -1}, got {self.rho}"
            )


def effective_reproduction_number(
    law: InfectivityLaw, quad: QuadratureSpec | None = None
) -> float:
    """Mean total scaled infectivity E[integral rate(t) dt]."""
    quad = quad or QuadratureSpec()
    return sum(w * draw.total_infectivity() for draw, w in law_nodes(law, quad))


def mean_laplace(law: InfectivityLaw, rho: float, quad: QuadratureSpec | None = None) -> float:
    """Mean discounted infectivity E[integral e^{-rho t} rate(t) dt].

    Strictly decreasing in ``rho``; equals the reproduction number at
    ``rho = 0``.
    """
    quad = quad or QuadratureSpec()
    return sum(w * draw.laplace(rho) for draw, w in law_nodes(law, quad))


def divergence_boundary(law: InfectivityLaw) -> float:
    """Largest rho below which the mean discounted infectivity is infinite.

    Bounded duration laws give -inf; each Exponential duration axis caps
    the boundary at minus its rate.
    """
    rates = [dlaw.rate for _, dlaw in law.duration_axes() if isinstance(dlaw, Exponential)]
    return -min(rates) if rates else float("-inf")


def decay_rate(
    law: InfectivityLaw, quad: QuadratureSpec | None = None, tol: float = 1e-8
) -> float:
    """Unique rho with ``mean_laplace(law, rho) == 1``, by bisection.

    The initial bracket expands geometrically from 0 (toward the divergence
    boundary on the subcritical side) until the condition straddles 1, then
    bisects to a bracket width of ``tol``.

    Raises
    ------
    NoFiniteRootError
        If the bracket expansion exhausts its budget without straddling 1,
        e.g. a law whose discounted infectivity stays below 1 all the way
        to the divergence boundary.
    """
    quad = quad or QuadratureSpec()
    r = effective_reproduction_number(law, quad)
    if abs(r - 1.0) < 1e-13:
        return 0.0

    def f(rho: float) -> float:
        return mean_laplace(law, rho, quad) - 1.0

    if r < 1.0:
        boundary = divergence_boundary(law)
        lo = None
        prev = 0.0
        for j in range(1, _MAX_EXPANSIONS + 1):
            cand = boundary * (1.0 - 0.5**j) if boundary > float("-inf") else -0.01 * 2.0 ** (j - 1)
            if f(cand) >= 0.0:
                lo, hi = cand, prev
                break
            prev = cand
        if lo is None:
            raise NoFiniteRootError(boundary)
    else:
        hi = None
        prev = 0.0
        for j in range(1, _MAX_EXPANSIONS + 1):
            cand = 0.01 * 2.0 ** (j - 1)
            if f(cand) <= 0.0:
                lo, hi = prev, cand
                break
            prev = cand
        if hi is None:
            raise NoFiniteRootError(float("inf"))

    # invariant: f(lo) >= 0 >= f(hi) with lo < hi (f decreasing)
    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def match_markov(r_eff: float, rho: float) -> tuple[float, float]:
    """Constant-rate/exponential parameters (lambda_hat, mu) reproducing
    the given reproduction number and decay rate.

    Inverts ``r_eff = lambda_hat / mu`` and ``rho = lambda_hat - mu``.
    """
    if r_eff <= 0:
        raise ValueError(f"r_eff must be > 0, got {r_eff}")
    if r_eff == 1.0:
        raise ValueError("r_eff = 1 is critical; no finite Markov match exists")
    if (r_eff - 1.0) * rho <= 0:
        raise ValueError(
            f"sign mismatch: r_eff = {r_eff} requires rho on the same side of 0"
        )
    mu = rho / (r_eff - 1.0)
    return r_eff * mu, mu


def calibrate_peak(target_r_eff: float, template: TriangularRamp) -> float:
    """Peak rate making the template's reproduction number equal the target.

    The per-trajectory total is peak * eta / 2, so the answer is closed
    form: ``2 * target / (s_bar * E[eta])``.
    """
    if target_r_eff < 0:
        raise ValueError(f"target must be >= 0, got {target_r_eff}")
    return 2.0 * target_r_eff / (template.susceptible_fraction * template.eta.mean())


def compute_characteristics(
    law: InfectivityLaw, quad: QuadratureSpec | None = None, tol: float = 1e-8
) -> EpidemicCharacteristics:
    """Bundle (R_eff, rho, scaling, rate bound) for a law."""
    quad = quad or QuadratureSpec()
    r = effective_reproduction_number(law, quad)
    rho = decay_rate(law, quad, tol)
    return EpidemicCharacteristics(
        r_eff=r,
        rho=rho,
        s_bar=law.susceptible_fraction,
        lambda_hat_star=law.rate_bound,
    )
