"""Shared fixtures and independent numerical oracles.

The oracles here are deliberately simple re-implementations (fixed-step
RK4, explicit loops) so they share no code path with the library routines
they check.
"""

import numpy as np
import pytest

import quadopo as q
from quadopo import positivep as pp


def rk4(f, y0, t_final, n_steps):
    """Plain fixed-step classical Runge-Kutta integrator."""
    y = np.array(y0, dtype=complex)
    h = t_final / n_steps
    for _ in range(n_steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


@pytest.fixture(scope="session")
def sym_params():
    return q.SystemParams.symmetric(chi=0.01, gamma=1.0)


@pytest.fixture(scope="session")
def free_ensemble_20k(sym_params):
    """Interaction-only run at the published operating point, desk scale.

    chi = 0.01, alpha0 = 1000 (so xi = 10), out to xi*t = 5.  Shared by the
    depletion and conservation checks; frames every xi*t = 0.1.
    """
    config = pp.SimConfig(n_traj=20_000, dt=2e-4, t_final=0.5, seed=11,
                          alpha1_0=1000.0, alpha2_0=1000.0, n_frames=51)
    return pp.simulate(sym_params, config)


@pytest.fixture(scope="session")
def pinned_ensemble_20k(sym_params):
    """Frozen-pump run: the low-mode sector is exactly linear with
    xi = chi * alpha0 = 1, so ensemble covariances must reproduce the
    matrix-exponential solution."""
    config = pp.SimConfig(n_traj=20_000, dt=5e-4, t_final=1.2, seed=5,
                          alpha1_0=100.0, alpha2_0=100.0, freeze_pumps=True,
                          n_frames=11)
    return pp.simulate(sym_params, config)
