"""Deterministic quadrature over duration laws.

Per-trajectory integrals are closed form (see :mod:`extl.profiles`), so the
only numerical error in expectations over an infectivity law comes from the
outer quadrature over its random durations.  Rules:

- Dirac: the single atom.
- Uniform: Gauss-Legendre mapped to [lo, hi], or equal-width midpoints.
- Exponential: Gauss-Laguerre nodes scaled by 1/rate (these carry the
  exponential weight exactly and keep spectral accuracy for the tilted
  integrals the decay-rate solver needs), or equal-probability quantile
  midpoints truncated at the 1 - 1e-10 quantile.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .profiles import Dirac, DurationLaw, Exponential, InfectivityLaw, ProfileDraw, Uniform

__all__ = ["QuadratureSpec", "duration_nodes", "unit_nodes", "law_nodes"]

#: mass left in the untreated tail of unbounded duration laws
TAIL_MASS = 1e-10


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts per duration axis plus the residual-age axis.

    ``m_tau`` applies to the latent-duration axis (tau or xi), ``m_eta`` to
    the infectious duration, and ``m_u`` to the uniform residual-age
    fraction used when ancestors are already part-way through their
    trajectory.
    """

    m_tau: int = 8
    m_eta: int = 16
    m_u: int = 16
    rule: str = "gauss"

    def __post_init__(self) -> None:
        for name in ("m_tau", "m_eta", "m_u"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.rule not in ("gauss", "midpoint"):
            raise ValueError(f"rule must be 'gauss' or 'midpoint', got {self.rule!r}")


def _leggauss01(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def duration_nodes(dlaw: DurationLaw, m: int, rule: str) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and probability weights for expectations over one duration law.

    Weights sum to 1 (minus the truncated tail mass for midpoint rules on
    unbounded laws).
    """
    if isinstance(dlaw, Dirac):
        return np.array([dlaw.value]), np.array([1.0])
    if isinstance(dlaw, Uniform):
        if rule == "gauss":
            x, w = _leggauss01(m)
        else:
            x = (np.arange(m) + 0.5) / m
            w = np.full(m, 1.0 / m)
        return dlaw.lo + (dlaw.hi - dlaw.lo) * x, w
    if isinstance(dlaw, Exponential):
        if rule == "gauss":
            x, w = np.polynomial.laguerre.laggauss(m)
            return x / dlaw.rate, w
        top = 1.0 - TAIL_MASS
        u = (np.arange(m) + 0.5) / m * top
        nodes = np.array([dlaw.quantile(q) for q in u])
        return nodes, np.full(m, top / m)
    raise TypeError(f"unsupported duration law: {dlaw!r}")


def unit_nodes(m: int, rule: str) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for expectations over a Uniform(0, 1) variable."""
    return duration_nodes(Uniform(0.0, 1.0), m, rule)


def _axis_count(spec: QuadratureSpec, name: str) -> int:
    return spec.m_eta if name == "eta" else spec.m_tau


def law_nodes(law: InfectivityLaw, spec: QuadratureSpec) -> list[tuple[ProfileDraw, float]]:
    """Tensor-product quadrature over the law's duration axes.

    Returns deterministic trajectory draws with their probability weights;
    expectations of any per-trajectory functional are weighted sums over
    this list.
    """
    axes = law.duration_axes()
    per_axis = [duration_nodes(dlaw, _axis_count(spec, name), spec.rule) for name, dlaw in axes]
    names = [name for name, _ in axes]
    out = []
    for combo in product(*(zip(nodes, weights) for nodes, weights in per_axis)):
        durations = {name: float(val) for name, (val, _) in zip(names, combo)}
        weight = float(np.prod([w for _, w in combo]))
        out.append((law.profile_from(**durations), weight))
    return out


def cell_stratification(
    dlaw: DurationLaw, n: int, t_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """Stratify a duration law by the grid cells ((j-1)/n, j/n].

    Returns per-cell masses and conditional means for all cells up to
    ``t_max`` (cells beyond the 1 - 1e-10 quantile are dropped).  Used by
    the constant-rate solver path so the death-time resolution of the
    outer expectation refines together with the grid.
    """
    if isinstance(dlaw, Dirac):
        return np.array([1.0]), np.array([dlaw.value])
    top = min(dlaw.quantile(1.0 - TAIL_MASS), t_max)
    j_max = int(np.ceil(top * n - 1e-12))
    j = np.arange(1, j_max + 1)
    a, b = (j - 1) / n, j / n
    if isinstance(dlaw, Uniform):
        lo_c, hi_c = np.maximum(a, dlaw.lo), np.minimum(b, dlaw.hi)
        width = np.maximum(hi_c - lo_c, 0.0)
        mass = width / (dlaw.hi - dlaw.lo)
        keep = mass > 0.0
        return mass[keep], (0.5 * (lo_c + hi_c))[keep]
    if isinstance(dlaw, Exponential):
        r = dlaw.rate
        ea, eb = np.exp(-r * a), np.exp(-r * b)
        mass = ea - eb
        mean = ((a + 1.0 / r) * ea - (b + 1.0 / r) * eb) / mass
        return mass, mean
    raise TypeError(f"unsupported duration law: {dlaw!r}")
