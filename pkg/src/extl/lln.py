"""Deterministic large-population limits: the Kermack-McKendrick integral
system and its ODE specializations.

The integral system evolves the susceptible fraction, the total force of
infection, and the infected/recovered fractions through convolutions with
the mean infectivity curve and the lifetime distribution of the law.  Its
main practical use here is producing the susceptible fraction at the time
the branching approximation takes over.

The convolutions are discretized with left-endpoint quadrature (first
order); the compartment updates share the same weights, so the compartment
sum is conserved to rounding regardless of the step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .profiles import ConstantRate, Exponential, ExposedConstantRate, InfectivityLaw
from .quadrature import QuadratureSpec, law_nodes

__all__ = [
    "MacroState",
    "Trajectory",
    "SIR",
    "SEIR",
    "integrate_kermack",
    "integrate_compartmental",
]

_CURVE_SPEC = QuadratureSpec(m_tau=96, m_eta=96, m_u=1, rule="midpoint")


@dataclass(frozen=True)
class MacroState:
    """Population fractions and force of infection at one time."""

    t: float
    susceptible: float
    infected: float
    recovered: float
    force: float = 0.0
    exposed: float = 0.0

    def __post_init__(self) -> None:
        for name in ("susceptible", "infected", "recovered", "exposed"):
            if getattr(self, name) < -1e-12:
                raise ValueError(f"{name} must be >= 0")
        total = self.susceptible + self.infected + self.recovered + self.exposed
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"compartments must sum to 1, got {total}")


@dataclass(frozen=True)
class Trajectory:
    """Trajectory arrays on a uniform time grid."""

    t: np.ndarray
    susceptible: np.ndarray
    infected: np.ndarray
    recovered: np.ndarray
    force: np.ndarray
    exposed: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.exposed is None:
            object.__setattr__(self, "exposed", np.zeros_like(self.t))

    def susceptible_at(self, t: float) -> float:
        return float(np.interp(t, self.t, self.susceptible))

    def state(self, idx: int) -> MacroState:
        return MacroState(
            t=float(self.t[idx]),
            susceptible=float(self.susceptible[idx]),
            infected=float(self.infected[idx]),
            recovered=float(self.recovered[idx]),
            force=float(self.force[idx]),
            exposed=float(self.exposed[idx]),
        )

    @property
    def drift(self) -> float:
        """Worst deviation of the compartment sum from its initial value."""
        total = self.susceptible + self.infected + self.recovered + self.exposed
        return float(np.max(np.abs(total - total[0])))


def _mean_curves(law: InfectivityLaw, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean rate curve E[rate(t)] and lifetime distribution P(lifetime <= t)."""
    if isinstance(law, ConstantRate):
        surv = 1.0 - law.eta.cdf(ts)
        return law.rate_bound * surv, law.eta.cdf(ts)
    if (
        isinstance(law, ExposedConstantRate)
        and isinstance(law.xi, Exponential)
        and isinstance(law.eta, Exponential)
    ):
        g, m = law.xi.rate, law.eta.rate
        if abs(g - m) > 1e-12:
            life_cdf = 1.0 - (m * np.exp(-g * ts) - g * np.exp(-m * ts)) / (m - g)
        else:
            life_cdf = 1.0 - (1.0 + g * ts) * np.exp(-g * ts)
        lam_bar = law.rate_bound * (law.xi.cdf(ts) - life_cdf)
        return lam_bar, life_cdf
    lam_bar = np.zeros_like(ts)
    life_cdf = np.zeros_like(ts)
    for draw, w in law_nodes(law, _CURVE_SPEC):
        lam_bar += w * draw.rate_on(ts)
        life_cdf += w * (draw.lifetime <= ts)
    return lam_bar, life_cdf


def _tilted_curves(law: InfectivityLaw, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean curves of a trajectory already a uniform fraction into its life.

    Averaging the shift over the uniform fraction gives closed forms per
    draw: the residual rate curve is (total - cumulative(t)) / lifetime and
    the residual-lifetime distribution is min(1, t / lifetime).
    """
    lam0 = np.zeros_like(ts)
    f0 = np.zeros_like(ts)
    for draw, w in law_nodes(law, _CURVE_SPEC):
        life = draw.lifetime
        if life <= 0.0:
            f0 += w
            continue
        total = draw.total_infectivity()
        lam0 += w * (total - draw.cumulative_on(ts)) / life
        f0 += w * np.minimum(1.0, ts / life)
    return lam0, f0


def integrate_kermack(
    law: InfectivityLaw,
    init: MacroState,
    step_h: float = 0.01,
    horizon: float = 100.0,
    tilted_initial: bool = True,
) -> Trajectory:
    """Integrate the renewal-type integral system for (S, force, I, R).

    The initially infected use residual-age mean curves by default
    (``tilted_initial``); with the flag off they behave like fresh
    infections.  Raises if the compartment sum drifts beyond 1e-6.
    """
    if step_h <= 0:
        raise ValueError(f"step_h must be > 0, got {step_h}")
    if init.exposed != 0.0:
        raise ValueError("the integral system carries latents inside 'infected'")
    steps = int(round(horizon / step_h))
    ts = np.arange(steps + 1) * step_h
    lam_bar, life_cdf = _mean_curves(law, ts)
    if tilted_initial:
        lam0, f0 = _tilted_curves(law, ts)
    else:
        lam0, f0 = lam_bar, life_cdf

    s0, i0, r0 = init.susceptible, init.infected, init.recovered
    S = np.empty(steps + 1)
    Phi = np.empty(steps + 1)
    I = np.empty(steps + 1)
    R = np.empty(steps + 1)
    G = np.empty(steps + 1)  # S * Phi, the new-infection rate
    S[0], Phi[0] = s0, i0 * lam0[0]
    I[0], R[0] = i0 * (1.0 - f0[0]), r0 + i0 * f0[0]
    G[0] = S[0] * Phi[0]
    g_sum = 0.0
    for k in range(1, steps + 1):
        past = G[k - 1 :: -1][:k]
        conv_lam = step_h * float(np.dot(lam_bar[1 : k + 1], past))
        conv_life = step_h * float(np.dot(life_cdf[1 : k + 1], past))
        g_sum += G[k - 1]
        inflow = step_h * g_sum
        S[k] = s0 - inflow
        Phi[k] = i0 * lam0[k] + conv_lam
        I[k] = i0 * (1.0 - f0[k]) + inflow - conv_life
        R[k] = r0 + i0 * f0[k] + conv_life
        G[k] = S[k] * Phi[k]
    traj = Trajectory(t=ts, susceptible=S, infected=I, recovered=R, force=Phi)
    if traj.drift > 1e-6:
        raise ArithmeticError(
            f"compartment sum drifted by {traj.drift}; reduce the step size"
        )
    return traj


@dataclass(frozen=True)
class SIR:
    """Constant-rate/exponential compartmental model."""

    lam: float
    mu: float

    def __post_init__(self) -> None:
        if self.lam <= 0 or self.mu <= 0:
            raise ValueError("rates must be positive")


@dataclass(frozen=True)
class SEIR:
    """SIR with an exponential latent stage at rate gamma."""

    lam: float
    gamma: float
    mu: float

    def __post_init__(self) -> None:
        if self.lam <= 0 or self.gamma <= 0 or self.mu <= 0:
            raise ValueError("rates must be positive")


def integrate_compartmental(
    model: SIR | SEIR,
    init: MacroState,
    step_h: float = 0.01,
    horizon: float = 100.0,
    freeze_susceptibles: bool = False,
) -> Trajectory:
    """Classical RK4 integration of the compartmental ODEs.

    ``freeze_susceptibles`` pins the susceptible fraction at its initial
    value inside the infection term (the linearization used to read off the
    exponential decline of infections).
    """
    if step_h <= 0:
        raise ValueError(f"step_h must be > 0, got {step_h}")
    steps = int(round(horizon / step_h))
    ts = np.arange(steps + 1) * step_h
    seir = isinstance(model, SEIR)
    s_frozen = init.susceptible

    def deriv(y: np.ndarray) -> np.ndarray:
        s, e, i, r = y
        s_eff = s_frozen if freeze_susceptibles else s
        new_inf = model.lam * s_eff * i
        if seir:
            return np.array(
                [-new_inf, new_inf - model.gamma * e, model.gamma * e - model.mu * i, model.mu * i]
            )
        return np.array([-new_inf, 0.0, new_inf - model.mu * i, model.mu * i])

    out = np.empty((steps + 1, 4))
    out[0] = (init.susceptible, init.exposed, init.infected, init.recovered)
    y = out[0].copy()
    for k in range(1, steps + 1):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * step_h * k1)
        k3 = deriv(y + 0.5 * step_h * k2)
        k4 = deriv(y + step_h * k3)
        y = y + (step_h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k] = y
    return Trajectory(
        t=ts,
        susceptible=out[:, 0],
        infected=out[:, 2],
        recovered=out[:, 3],
        force=model.lam * out[:, 2],
        exposed=out[:, 1],
    )
