"""Steady states, linearized drift/noise matrices and output spectra.

Fluctuations around a classical steady state obey
d(delta) = -Abar delta dt + Bbar dW over the 12-component ordering
(da1, da1+, ..., da6, da6+).  When every eigenvalue of Abar has positive
real part this is an Ornstein-Uhlenbeck process whose stationary spectral
correlation matrix is

    S(w) = (Abar + i w I)^-1 Bbar Bbar^T (Abar^T - i w I)^-1,

and the measurable output spectra follow from the cavity input-output
relations S_out = 1 + 2 gamma S (variances) and 2 sqrt(gamma_i gamma_j) S
(covariances) in the quadrature basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import SystemParams, quadrature_transform
from .positivep import noise_increments
from .vlf import optimized_gains, vlf_correlations


class NoConvergence(RuntimeError):
    """Steady-state relaxation or Newton polish failed."""


class PhaseDiffusionRisk(RuntimeError):
    """Above threshold with no injected signal the overall phase is
    undefined and drifts, so no useful steady state exists."""


class UnstableModel(RuntimeError):
    """The OU spectrum formula needs all drift eigenvalues in the right
    half plane."""


def mean_field_drift(alpha: np.ndarray, params: SystemParams) -> np.ndarray:
    """Classical equations for the six mode amplitudes (alpha+ -> alpha*)."""
    a1, a2, a3, a4, a5, a6 = alpha
    g = params.gamma
    chi1, chi2 = params.chi1, params.chi2
    return np.array([
        params.eps1 - chi1 * (a4 * a5 + a3 * a6) - g[0] * a1,
        params.eps2 - chi2 * a5 * a6 - g[1] * a2,
        params.eps3_injected + chi1 * a1 * np.conj(a6) - g[2] * a3,
        chi1 * a1 * np.conj(a5) - g[3] * a4,
        chi1 * a1 * np.conj(a4) + chi2 * a2 * np.conj(a6) - g[4] * a5,
        chi1 * a1 * np.conj(a3) + chi2 * a2 * np.conj(a5) - g[5] * a6,
    ])


def _to_12(alpha6: np.ndarray) -> np.ndarray:
    out = np.empty(12, dtype=complex)
    out[0::2] = alpha6
    out[1::2] = np.conj(alpha6)
    return out


def drift_matrix(params: SystemParams, steady: np.ndarray) -> np.ndarray:
    """Assemble Abar from its printed blocks with steady-state values.

    steady follows the 12-component ordering; the conjugate entries are
    taken from it directly, so a non-conjugate-symmetric vector would be
    honored as given.
    """
    s = np.asarray(steady, dtype=complex)
    a1, a1c = s[0], s[1]
    a2, a2c = s[2], s[3]
    low = s[4::2]       # a3..a6
    lowc = s[5::2]      # their conjugate partners
    chi1, chi2 = params.chi1, params.chi2
    g = params.gamma

    a = np.zeros((12, 12), dtype=complex)
    # Pump block A1.
    a[0, 0] = a[1, 1] = g[0]
    a[2, 2] = a[3, 3] = g[1]
    # Pump-to-low block A2: row a1 couples (a6, a5, a4, a3), row a2 (a6, a5).
    a3_, a4_, a5_, a6_ = low
    a3c, a4c, a5c, a6c = lowc
    a[0, 4], a[0, 6], a[0, 8], a[0, 10] = (chi1 * a6_, chi1 * a5_,
                                           chi1 * a4_, chi1 * a3_)
    a[1, 5], a[1, 7], a[1, 9], a[1, 11] = (chi1 * a6c, chi1 * a5c,
                                           chi1 * a4c, chi1 * a3c)
    a[2, 8], a[2, 10] = chi2 * a6_, chi2 * a5_
    a[3, 9], a[3, 11] = chi2 * a6c, chi2 * a5c
    # Lower-left block is -(A2*)^T.
    a[4:, 0:4] = -np.conj(a[0:4, 4:]).T
    # Low-mode block A3.
    for k, mode_gamma in enumerate((g[2], g[2], g[3], g[3], g[4], g[4],
                                    g[5], g[5])):
        a[4 + k, 4 + k] = mode_gamma
    a[4, 11] = -chi1 * a1    # da3  <- da6+
    a[5, 10] = -chi1 * a1c   # da3+ <- da6
    a[6, 9] = -chi1 * a1     # da4  <- da5+
    a[7, 8] = -chi1 * a1c    # da4+ <- da5
    a[8, 7] = -chi1 * a1     # da5  <- da4+
    a[9, 6] = -chi1 * a1c    # da5+ <- da4
    a[10, 5] = -chi1 * a1    # da6  <- da3+
    a[11, 4] = -chi1 * a1c   # da6+ <- da3
    a[8, 11] = -chi2 * a2    # da5  <- da6+
    a[9, 10] = -chi2 * a2c   # da5+ <- da6
    a[10, 9] = -chi2 * a2    # da6  <- da5+
    a[11, 8] = -chi2 * a2c   # da6+ <- da5
    return a


def noise_matrix(params: SystemParams, steady: np.ndarray) -> np.ndarray:
    """Bbar: the SDE noise coefficients evaluated at the steady state.

    Column k is the response to a unit eta_{k+1}, taken from the same
    factorization the stochastic integrator uses.
    """
    s = np.asarray(steady, dtype=complex)
    b = np.zeros((12, 12), dtype=complex)
    for k in range(12):
        eta = np.zeros(12)
        eta[k] = 1.0
        b[:, k] = noise_increments(s, eta, params)
    return b


def eigenvalues_below_threshold(params: SystemParams) -> np.ndarray:
    """The six closed-form drift eigenvalues below threshold.

    Valid for equal cavity losses; each value appears in the 12x12
    spectrum with multiplicity two.  Only lambda[2] (and in principle
    lambda[3]) can turn negative, which marks the oscillation threshold.
    """
    g = params.gamma
    if len(set(g)) != 1:
        raise ValueError("closed-form eigenvalues assume equal losses")
    g1, g2 = g[0], g[1]
    a = params.eps1 * params.chi1 / g1
    b = params.eps2 * params.chi2 / g2
    rt = np.sqrt(4.0 * a * a + b * b)
    return np.array([
        g1,
        g1,
        g2 - 0.5 * (b + rt),
        g2 + 0.5 * (b - rt),
        g2 + 0.5 * (-b + rt),
        g2 + 0.5 * (b + rt),
    ])


@dataclass(frozen=True)
class LinearizedModel:
    """Drift and noise matrices of the fluctuation equations plus the
    steady state they were linearized around."""

    params: SystemParams
    steady: np.ndarray = field(repr=False)
    drift: np.ndarray = field(repr=False)
    noise: np.ndarray = field(repr=False)
    stable: bool

    @property
    def diffusion(self) -> np.ndarray:
        return self.noise @ self.noise.T

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.drift)

    def audit_dict(self) -> dict:
        """JSON-ready dump of the matrices and spectrum."""
        eig = np.sort_complex(self.eigenvalues())

        def split(m):
            m = np.asarray(m)
            return {"real": m.real.tolist(), "imag": m.imag.tolist()}

        return {
            "params": self.params.to_dict(),
            "steady": split(self.steady),
            "drift": split(self.drift),
            "noise": split(self.noise),
            "eigenvalues": split(eig),
            "stable": self.stable,
        }


def assemble(params: SystemParams, steady: np.ndarray) -> LinearizedModel:
    """Build the linearized model at a fixed point of the mean-field flow."""
    steady = np.asarray(steady, dtype=complex)
    a = drift_matrix(params, steady)
    b = noise_matrix(params, steady)
    stable = bool(np.linalg.eigvals(a).real.min() > 0.0)
    steady = steady.copy()
    steady.setflags(write=False)
    a.setflags(write=False)
    b.setflags(write=False)
    return LinearizedModel(params=params, steady=steady, drift=a, noise=b,
                           stable=stable)


def _relax_to_fixed_point(params: SystemParams, start: np.ndarray,
                          window: float, max_windows: int,
                          settle_tol: float) -> np.ndarray:
    def rhs(_, y):
        f = mean_field_drift(y[:6] + 1j * y[6:], params)
        return np.concatenate([f.real, f.imag])

    y = np.concatenate([start.real, start.imag])
    for _ in range(max_windows):
        sol = solve_ivp(rhs, (0.0, window), y, rtol=1e-10, atol=1e-12,
                        method="RK45")
        if not sol.success:
            raise NoConvergence(f"relaxation integrator failed: {sol.message}")
        y = sol.y[:, -1]
        if np.max(np.abs(rhs(0.0, y))) < settle_tol:
            return y[:6] + 1j * y[6:]
    raise NoConvergence(
        f"mean-field flow did not settle within {max_windows} windows "
        f"of {window} time units")


def classical_jacobian(params: SystemParams, alpha: np.ndarray) -> np.ndarray:
    """Real-stacked 12x12 Jacobian of the classical mean-field drift.

    Built from the same blocks as the fluctuation drift matrix: with
    F_a = d f/d alpha and F_c = d f/d alpha* the real form is
    [[Re(F_a + F_c), -Im(F_a - F_c)], [Im(F_a + F_c), Re(F_a - F_c)]].
    """
    a_bar = drift_matrix(params, _to_12(alpha))
    f_a = -a_bar[0::2, 0::2]
    f_c = -a_bar[0::2, 1::2]
    plus, minus = f_a + f_c, f_a - f_c
    return np.block([[plus.real, -minus.imag],
                     [plus.imag, minus.real]])


def steady_state(params: SystemParams, *, residual_tol: float = 1e-10,
                 relax_window: float = 50.0, max_windows: int = 200) -> np.ndarray:
    """Fixed point of the classical mean-field equations, 12-component.

    Without injection the below-threshold analytic solution
    (eps_i/gamma_i pumps, empty low modes) is returned when it is stable;
    if it is not, the system is above threshold and PhaseDiffusionRisk is
    raised because the low-mode phase is free to diffuse.  With an
    injected signal the fixed point is found by time relaxation followed
    by a Newton polish to |drift| <= residual_tol.
    """
    candidate = np.array([params.eps1 / params.gamma[0],
                          params.eps2 / params.gamma[1],
                          0.0, 0.0, 0.0, 0.0], dtype=complex)
    if params.eps3_injected == 0.0:
        a = drift_matrix(params, _to_12(candidate))
        if np.linalg.eigvals(a).real.min() > 0.0:
            return _to_12(candidate)
        raise PhaseDiffusionRisk(
            "pump is at or above threshold and no signal is injected; "
            "the low-mode phase diffuses and no steady state is selected")

    start = candidate.copy()
    start[2] = params.eps3_injected / params.gamma[2]
    alpha = _relax_to_fixed_point(params, start, relax_window, max_windows,
                                  settle_tol=1e-6)

    # Newton polish with the analytic Jacobian; the weakly-pinned phase
    # mode makes finite-difference quasi-Newton solvers stall here.
    for _ in range(60):
        f = mean_field_drift(alpha, params)
        if np.max(np.abs(f)) < 1e-13:
            break
        rhs = np.concatenate([f.real, f.imag])
        jac = classical_jacobian(params, alpha)
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, rhs, rcond=None)[0]
        alpha = alpha - (step[:6] + 1j * step[6:])
    res = np.max(np.abs(mean_field_drift(alpha, params)))
    if res > residual_tol:
        raise NoConvergence(f"fixed-point residual {res:.3e} above "
                            f"{residual_tol:.1e}")
    return _to_12(alpha)


def ou_spectrum(drift: np.ndarray, diffusion: np.ndarray,
                omega: float) -> np.ndarray:
    """Stationary spectral matrix (A + iw)^-1 D (A^T - iw)^-1 of an OU
    process d(x) = -A x dt + B dW with D = B B^T."""
    n = drift.shape[0]
    eye = np.eye(n)
    left = np.linalg.solve(drift + 1j * omega * eye, diffusion.astype(complex))
    return np.linalg.solve(drift - 1j * omega * eye, left.T).T


def intracavity_spectrum(model: LinearizedModel, omega: float) -> np.ndarray:
    """12x12 intracavity spectral correlation matrix at one frequency."""
    if not model.stable:
        raise UnstableModel(
            "drift matrix has an eigenvalue with non-positive real part; "
            "the OU spectrum formula does not apply")
    return ou_spectrum(model.drift, model.diffusion, omega)


_T8 = quadrature_transform()


def output_quadrature_spectrum(model: LinearizedModel,
                               omega: float) -> tuple[np.ndarray, float]:
    """Measurable 8x8 output spectrum over (X3, Y3, ..., X6, Y6) at one
    frequency, plus the discarded non-symmetric defect (a numerical
    diagnostic; it should vanish).

    Vacuum inputs give the identity, so the VLF bound stays at 4.
    """
    s12 = intracavity_spectrum(model, omega)
    sq = _T8 @ s12[4:, 4:] @ _T8.T
    sym = 0.5 * (sq + sq.T)
    defect = float(np.max(np.abs(sym.imag)) + np.max(np.abs(sq - sq.T)) / 2.0)
    sqr = sym.real
    root_g = np.sqrt(np.repeat([model.params.gamma[2:6]], 2, axis=1).ravel())
    return np.eye(8) + 2.0 * np.outer(root_g, root_g) * sqr, defect


@dataclass(frozen=True)
class SpectrumSeries:
    """Per-frequency intracavity matrices, output spectra and optimized
    VLF triples (I36, I45, I56) with the gains used."""

    omega: np.ndarray = field(repr=False)
    s_intra: np.ndarray = field(repr=False)
    s_out: np.ndarray = field(repr=False)
    i_out: np.ndarray = field(repr=False)
    gains: np.ndarray = field(repr=False)
    symmetry_defect: float = 0.0

    def min_violations(self) -> tuple[np.ndarray, np.ndarray]:
        """(min over omega of each I_out, argmin frequencies)."""
        idx = np.argmin(self.i_out, axis=0)
        return self.i_out.min(axis=0), self.omega[idx]


def output_spectra(model: LinearizedModel, omega_grid) -> SpectrumSeries:
    """Evaluate output spectra and per-frequency optimized VLF values.

    Gains are re-optimized independently at every frequency point.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    n = omega_grid.size
    s_intra = np.empty((n, 12, 12), dtype=complex)
    s_out = np.empty((n, 8, 8))
    i_out = np.empty((n, 3))
    gains = np.empty((n, 4))
    defect = 0.0
    for k, w in enumerate(omega_grid):
        s_intra[k] = intracavity_spectrum(model, w)
        s_out[k], d = output_quadrature_spectrum(model, w)
        defect = max(defect, d)
        g = optimized_gains(s_out[k])
        rep = vlf_correlations(s_out[k], g)
        i_out[k] = rep.values()
        gains[k] = (g.g3, g.g4, g.g5, g.g6)
    return SpectrumSeries(omega=omega_grid, s_intra=s_intra, s_out=s_out,
                          i_out=i_out, gains=gains, symmetry_defect=defect)


def default_omega_grid(omega_max: float = 20.0, n_linear: int = 199,
                       omega_min: float = 1e-3, n_log: int = 30) -> np.ndarray:
    """Log-spaced points near zero (to resolve the bifurcation) joined to
    a linear grid up to omega_max."""
    knee = min(0.2, omega_max / 10.0)
    log_part = np.geomspace(omega_min, knee, n_log, endpoint=False)
    lin_part = np.linspace(knee, omega_max, n_linear)
    return np.concatenate([log_part, lin_part])


@dataclass(frozen=True)
class ScanPoint:
    eps_ratio: float
    valid: bool
    min_i36: float
    min_i45: float
    min_i56: float
    argmin_omega: float
    note: str = ""


def threshold_scan(params: SystemParams, eps_ratios, omega_grid=None, *,
                   inject_above: float = 0.5,
                   exclusion_halfwidth: float = 0.004) -> list[ScanPoint]:
    """Minimum of each output correlation over frequency, per pump ratio.

    Ratios inside the excluded neighborhood of threshold, and points whose
    model is unstable or fails to converge, are reported as invalid rows
    rather than dropped.  Above threshold the scan injects a signal of
    amplitude inject_above to pin the phase; below it none is used.
    """
    from .core import critical_pump
    from dataclasses import replace as dc_replace

    if omega_grid is None:
        omega_grid = default_omega_grid()
    eps_c = critical_pump(params)
    points = []
    nan = float("nan")
    for ratio in np.asarray(eps_ratios, dtype=float):
        if abs(ratio - 1.0) < exclusion_halfwidth:
            points.append(ScanPoint(ratio, False, nan, nan, nan, nan,
                                    "inside near-threshold exclusion"))
            continue
        eps3 = inject_above if ratio > 1.0 else 0.0
        p = dc_replace(params, eps1=ratio * eps_c, eps2=ratio * eps_c,
                       eps3_injected=eps3)
        try:
            model = assemble(p, steady_state(p))
            if not model.stable:
                points.append(ScanPoint(ratio, False, nan, nan, nan, nan,
                                        "unstable linearized model"))
                continue
            series = output_spectra(model, omega_grid)
        except (NoConvergence, PhaseDiffusionRisk, UnstableModel) as exc:
            points.append(ScanPoint(ratio, False, nan, nan, nan, nan,
                                    type(exc).__name__))
            continue
        mins, argmins = series.min_violations()
        points.append(ScanPoint(ratio, True, mins[0], mins[1], mins[2],
                                argmins[0]))
    return points
