"""Analytic evolution of the low-frequency modes with undepleted pumps.

With the pumps frozen at their initial amplitudes the eight quadrature
operators obey linear ODEs: the X sector is coupled by +xi terms and the
Y sector by -xi terms.  The propagator is a symplectic matrix exponential,
so Gaussian states stay Gaussian and every variance of interest follows
from covariance algebra; no diffusion term appears in this cavity-free
picture.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .core import (C1, C2, CouplingGraph, build_graph_matrices, symplectic_form,
                   x_index, y_index)


@dataclass(frozen=True)
class UndepletedParams:
    """Pump-enhanced couplings xi_i = chi_i * <a_i(0)> and interaction time."""

    xi1: float
    xi2: float
    t: float = 0.0

    def __post_init__(self):
        if self.xi1 < 0 or self.xi2 < 0:
            raise ValueError("couplings xi1, xi2 must be >= 0")

    @classmethod
    def symmetric(cls, xi: float, t: float = 0.0) -> "UndepletedParams":
        return cls(xi1=xi, xi2=xi, t=t)

    @property
    def r(self) -> float:
        """Squeezing parameter r = xi * t (symmetric couplings only)."""
        if self.xi1 != self.xi2:
            raise ValueError("squeezing parameter r is defined for xi1 == xi2")
        return self.xi1 * self.t

    def at(self, t: float) -> "UndepletedParams":
        return replace(self, t=t)


def coupling_matrix(xi1: float, xi2: float) -> np.ndarray:
    """4x4 symmetric mode-coupling matrix over (3, 4, 5, 6).

    Edges 3-6 and 4-5 carry xi1, edge 5-6 carries xi2; for xi1 == xi2 this
    is xi * G.
    """
    m = np.zeros((4, 4))
    m[0, 3] = m[3, 0] = xi1
    m[1, 2] = m[2, 1] = xi1
    m[2, 3] = m[3, 2] = xi2
    return m


def quadrature_generator(p: UndepletedParams) -> np.ndarray:
    """8x8 generator M of the quadrature ODEs dq/dt = M q.

    dX_i/dt = +sum_j m_ij X_j and dY_i/dt = -sum_j m_ij Y_j in the
    interleaved ordering (X3, Y3, ..., X6, Y6).
    """
    m4 = coupling_matrix(p.xi1, p.xi2)
    gen = np.zeros((8, 8))
    for i in range(4):
        for j in range(4):
            gen[2 * i, 2 * j] = m4[i, j]
            gen[2 * i + 1, 2 * j + 1] = -m4[i, j]
    return gen


def heisenberg_propagator(p: UndepletedParams) -> np.ndarray:
    """Symplectic propagator S(t) = exp(M t) for the quadrature vector."""
    return expm(quadrature_generator(p) * p.t)


@dataclass(frozen=True)
class CovarianceState:
    """Gaussian state of the low modes: 8-vector of means, 8x8 covariance.

    Ordering (X3, Y3, X4, Y4, X5, Y5, X6, Y6); vacuum is mean 0 and
    covariance identity.
    """

    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.shape != (8,) or cov.shape != (8, 8):
            raise ValueError("mean must be an 8-vector and cov an 8x8 matrix")
        if not np.allclose(cov, cov.T, atol=1e-10):
            raise ValueError("covariance matrix must be symmetric")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls) -> "CovarianceState":
        return cls(mean=np.zeros(8), cov=np.eye(8))

    def variance_of(self, coeffs: np.ndarray) -> float:
        """Variance of the linear quadrature combination coeffs . q."""
        c = np.asarray(coeffs, dtype=float)
        return float(c @ self.cov @ c)

    def uncertainty_defect(self) -> float:
        """Most negative eigenvalue of cov + i*Omega (>= 0 means physical)."""
        omega = symplectic_form()
        eig = np.linalg.eigvalsh(self.cov + 1j * omega)
        return float(eig.min())


def evolve_covariance(initial: CovarianceState, p: UndepletedParams) -> CovarianceState:
    """Propagate mean and covariance through S = exp(M t)."""
    s = heisenberg_propagator(p)
    return CovarianceState(mean=s @ initial.mean, cov=s @ initial.cov @ s.T)


@dataclass(frozen=True)
class JointOperator:
    """One of the four squeezed joint quadrature combinations.

    coeffs is a 4-vector over modes (3, 4, 5, 6) acting on the stated
    sector; for symmetric couplings the variance decays as
    exp(-2 * decay * xi * t).
    """

    name: str
    sector: str  # "X" or "Y"
    coeffs: tuple[float, float, float, float]
    decay: float

    def full_coeffs(self) -> np.ndarray:
        """Coefficients embedded in the 8-dim quadrature ordering."""
        c = np.zeros(8)
        idx = x_index if self.sector == "X" else y_index
        for mode, w in zip((3, 4, 5, 6), self.coeffs):
            c[idx(mode)] = w
        return c

    def vacuum_variance(self) -> float:
        return float(sum(w * w for w in self.coeffs))


JOINT_OPERATORS = (
    JointOperator("O1", "X", (-C1, C1, -1.0, 1.0), C2),
    JointOperator("O2", "X", (-C2, -C2, 1.0, 1.0), C1),
    JointOperator("O3", "Y", (C1, C1, 1.0, 1.0), C2),
    JointOperator("O4", "Y", (C2, -C2, -1.0, 1.0), C1),
)


def joint_operator_variances(p: UndepletedParams, t_grid,
                             initial: CovarianceState | None = None) -> np.ndarray:
    """Variances of the four joint operators along t_grid, shape (len(t), 4).

    Starts from vacuum unless an initial state is given.  For symmetric
    couplings V(O1) = V(O3) ~ exp(-2 C2 xi t) and V(O2) = V(O4)
    ~ exp(-2 C1 xi t).
    """
    state0 = CovarianceState.vacuum() if initial is None else initial
    coeffs = np.stack([op.full_coeffs() for op in JOINT_OPERATORS])
    out = np.empty((len(t_grid), 4))
    for k, t in enumerate(t_grid):
        state = evolve_covariance(state0, p.at(t))
        out[k] = np.einsum("ij,jk,ik->i", coeffs, state.cov, coeffs)
    return out


def rotate_modes_56(state: CovarianceState) -> CovarianceState:
    """Apply the pi/2 rotation of modes 5 and 6 used by the cluster check.

    The rotated quadratures are X' = -Y, Y' = X on those modes, i.e. the
    substitution that carries the joint-operator combinations into the
    cluster-nullifier span.
    """
    rot = np.eye(8)
    for mode in (5, 6):
        ix, iy = x_index(mode), y_index(mode)
        rot[ix, ix] = 0.0
        rot[iy, iy] = 0.0
        rot[ix, iy] = -1.0
        rot[iy, ix] = 1.0
    return CovarianceState(mean=rot @ state.mean, cov=rot @ state.cov @ rot.T)


def nullifier_rows(graph: CouplingGraph) -> np.ndarray:
    """Coefficient rows of Y - A.X in the 8-dim quadrature ordering."""
    rows = np.zeros((4, 8))
    for i, mode_i in enumerate((3, 4, 5, 6)):
        rows[i, y_index(mode_i)] = 1.0
        for j, mode_j in enumerate((3, 4, 5, 6)):
            rows[i, x_index(mode_j)] -= graph.a_cluster[i, j]
    return rows


def cluster_residuals(state: CovarianceState,
                      graph: CouplingGraph | None = None) -> np.ndarray:
    """Variances of the four nullifier rows after rotating modes 5 and 6.

    For the vacuum each residual is 1 + 1/4 + 5/4 = 2.5; a cluster state
    drives all four to zero.
    """
    if graph is None:
        graph = build_graph_matrices()
    rotated = rotate_modes_56(state)
    rows = nullifier_rows(graph)
    return np.einsum("ij,jk,ik->i", rows, rotated.cov, rows)
