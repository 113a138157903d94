import math

import numpy as np
import pytest

from extl import (
    SEIR,
    SIR,
    ConstantRate,
    Exponential,
    MacroState,
    integrate_compartmental,
    integrate_kermack,
)
from conftest import ramp_law


def start(i0=0.01, r0=0.0):
    return MacroState(t=0.0, susceptible=1.0 - i0 - r0, infected=i0, recovered=r0)


class TestMacroState:
    def test_conservation_enforced(self):
        with pytest.raises(ValueError):
            MacroState(t=0.0, susceptible=0.9, infected=0.2, recovered=0.0)
        with pytest.raises(ValueError):
            MacroState(t=0.0, susceptible=1.1, infected=-0.1, recovered=0.0)


class TestKermack:
    def test_mass_conservation(self):
        law = ConstantRate(lam=0.3, eta=Exponential(0.25))
        traj = integrate_kermack(law, start(), 0.02, 40.0, tilted_initial=False)
        assert traj.drift <= 1e-9

    def test_mass_conservation_ramp(self):
        traj = integrate_kermack(ramp_law(0.3), start(), 0.05, 30.0)
        assert traj.drift <= 1e-9

    def test_no_epidemic_stays_constant(self):
        law = ConstantRate(lam=0.3, eta=Exponential(0.25))
        traj = integrate_kermack(law, start(i0=0.0), 0.02, 20.0)
        assert np.all(traj.susceptible == traj.susceptible[0])
        assert np.all(traj.infected == 0.0)
        assert np.all(traj.force == 0.0)

    def test_matches_sir_ode_with_first_order_convergence(self):
        law = ConstantRate(lam=0.3, eta=Exponential(0.25))
        model = SIR(0.3, 0.25)
        errs = []
        for h in (0.08, 0.04, 0.02):
            kermack = integrate_kermack(law, start(), h, 40.0, tilted_initial=False)
            ode = integrate_compartmental(model, start(), h, 40.0)
            errs.append(np.abs(kermack.susceptible - ode.susceptible).max())
        assert errs[0] > errs[1] > errs[2]
        assert 0.35 <= errs[1] / errs[0] <= 0.65
        assert 0.35 <= errs[2] / errs[1] <= 0.65

    def test_monotone_compartments(self):
        traj = integrate_kermack(ramp_law(0.3), start(), 0.05, 30.0)
        assert np.all(np.diff(traj.susceptible) <= 1e-12)
        assert np.all(np.diff(traj.recovered) >= -1e-12)

    def test_initial_condition_flag_matters(self):
        law = ramp_law(0.3)
        tilted = integrate_kermack(law, start(), 0.05, 20.0, tilted_initial=True)
        fresh = integrate_kermack(law, start(), 0.05, 20.0, tilted_initial=False)
        assert np.abs(tilted.force - fresh.force).max() > 1e-4

    def test_rejects_exposed_compartment(self):
        state = MacroState(t=0.0, susceptible=0.98, infected=0.01, recovered=0.0, exposed=0.01)
        with pytest.raises(ValueError):
            integrate_kermack(ramp_law(0.3), state, 0.05, 10.0)

    def test_susceptible_at_interpolates(self):
        law = ConstantRate(lam=0.3, eta=Exponential(0.25))
        traj = integrate_kermack(law, start(), 0.02, 20.0, tilted_initial=False)
        assert traj.susceptible_at(0.0) == traj.susceptible[0]
        assert traj.susceptible[10] >= traj.susceptible_at(10.0) >= traj.susceptible[-1]


class TestCompartmental:
    def test_constant_without_infecteds(self):
        traj = integrate_compartmental(SIR(0.3, 0.25), start(i0=0.0), 0.01, 10.0)
        assert np.all(traj.susceptible == traj.susceptible[0])

    def test_frozen_susceptibles_linearize(self):
        # with the susceptible fraction pinned, infections decay exactly
        # exponentially at rate lam * s0 - mu
        model = SIR(0.25, 0.3)
        init = start(i0=0.05)
        traj = integrate_compartmental(model, init, 0.01, 30.0, freeze_susceptibles=True)
        rate = model.lam * init.susceptible - model.mu
        expected = init.infected * np.exp(rate * traj.t)
        np.testing.assert_allclose(traj.infected, expected, rtol=1e-6)

    def test_seir_fast_latency_approaches_sir(self):
        init = start(i0=0.02)
        sir = integrate_compartmental(SIR(0.4, 0.2), init, 0.001, 30.0)
        seir = integrate_compartmental(SEIR(0.4, 1000.0, 0.2), init, 0.001, 30.0)
        assert np.abs(sir.infected - seir.infected).max() < 0.01

    def test_fourth_order_convergence(self):
        model = SIR(0.5, 0.2)
        init = start(i0=0.05)
        reference = integrate_compartmental(model, init, 0.0125, 20.0)
        errs = []
        for h in (0.4, 0.2, 0.1):
            traj = integrate_compartmental(model, init, h, 20.0)
            stride = int(round(h / 0.0125))
            errs.append(np.abs(traj.infected - reference.infected[::stride]).max())
        ratios = [errs[0] / errs[1], errs[1] / errs[2]]
        assert all(10.0 <= r <= 24.0 for r in ratios)

    def test_mass_conserved(self):
        traj = integrate_compartmental(SEIR(0.4, 0.5, 0.2), start(i0=0.02), 0.01, 40.0)
        assert traj.drift <= 1e-9

    def test_monotone_compartments(self):
        traj = integrate_compartmental(SIR(0.4, 0.2), start(i0=0.02), 0.01, 40.0)
        assert np.all(np.diff(traj.susceptible) <= 1e-12)
        assert np.all(np.diff(traj.recovered) >= -1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            SIR(0.0, 0.2)
        with pytest.raises(ValueError):
            SEIR(0.4, -1.0, 0.2)
        with pytest.raises(ValueError):
            integrate_compartmental(SIR(0.4, 0.2), start(), 0.0, 10.0)
