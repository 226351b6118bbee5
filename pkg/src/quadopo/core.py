"""System parameters, mode conventions and the coupling graph.

Mode conventions used throughout the package:

* modes 1 and 2 are the pumped high-frequency modes, modes 3..6 the
  down-converted low-frequency modes;
* the 12-dimensional phase-space ordering is
  (a1, a1+, a2, a2+, a3, a3+, ..., a6, a6+);
* the 8-dimensional quadrature ordering over the low modes is
  (X3, Y3, X4, Y4, X5, Y5, X6, Y6) with X = a + a+, Y = -i(a - a+),
  so [X, Y] = 2i and the vacuum covariance matrix is the identity.

Everything is dimensionless: time in units of the inverse loss rate,
analysis frequencies in units of the loss rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

# Golden-ratio pair: C1 * C2 = 1 and C2 - C1 = 1.
C1 = (math.sqrt(5.0) - 1.0) / 2.0
C2 = (math.sqrt(5.0) + 1.0) / 2.0

LOW_MODES = (3, 4, 5, 6)

VACUUM_VARIANCE = 1.0


class AsymmetricParameters(ValueError):
    """Raised when a symmetric-only formula is called with asymmetric input."""


def x_index(mode: int) -> int:
    """Position of X_mode in the 8-dim quadrature ordering."""
    return 2 * (mode - 3)


def y_index(mode: int) -> int:
    """Position of Y_mode in the 8-dim quadrature ordering."""
    return 2 * (mode - 3) + 1


def alpha_index(mode: int) -> int:
    """Position of alpha_mode in the 12-dim phase-space ordering."""
    return 2 * (mode - 1)


def alpha_plus_index(mode: int) -> int:
    """Position of alpha+_mode in the 12-dim phase-space ordering."""
    return 2 * (mode - 1) + 1


@dataclass(frozen=True)
class QuadratureConvention:
    """X = a + a+, Y = -i(a - a+); [X, Y] = 2i; vacuum variance 1."""

    vacuum_variance: float = VACUUM_VARIANCE
    commutator_scale: float = 2.0

    def symplectic_form(self, n_modes: int = 4) -> np.ndarray:
        """Matrix Omega with [q_a, q_b] = (commutator scale) * i * Omega_ab."""
        j = np.array([[0.0, 1.0], [-1.0, 0.0]])
        return np.kron(np.eye(n_modes), j)

    def vacuum_covariance(self, n_modes: int = 4) -> np.ndarray:
        return self.vacuum_variance * np.eye(2 * n_modes)


QUADRATURES = QuadratureConvention()


def symplectic_form() -> np.ndarray:
    """8x8 symplectic form for the low-mode quadrature ordering."""
    return QUADRATURES.symplectic_form(4)


def quadrature_transform() -> np.ndarray:
    """Map from (a3, a3+, ..., a6, a6+) to (X3, Y3, ..., X6, Y6).

    Complex 8x8 matrix T with X_i = a_i + a_i+ and Y_i = -i(a_i - a_i+);
    second moments transform as T S T^T (plain transpose).
    """
    t = np.zeros((8, 8), dtype=complex)
    for k in range(4):
        t[2 * k, 2 * k] = 1.0
        t[2 * k, 2 * k + 1] = 1.0
        t[2 * k + 1, 2 * k] = -1.0j
        t[2 * k + 1, 2 * k + 1] = 1.0j
    return t


@dataclass(frozen=True)
class SystemParams:
    """Cavity and driving parameters, all dimensionless.

    gamma holds the six loss rates in mode order 1..6.  eps3_injected is
    the weak coherent drive on mode 3 used to pin the phase above the
    oscillation threshold; zero disables it.
    """

    chi1: float = 0.01
    chi2: float = 0.01
    gamma: tuple[float, ...] = (1.0,) * 6
    eps1: float = 0.0
    eps2: float = 0.0
    eps3_injected: float = 0.0

    def __post_init__(self):
        if not (self.chi1 > 0 and self.chi2 > 0):
            raise ValueError("nonlinearities chi1, chi2 must be positive")
        if len(self.gamma) != 6:
            raise ValueError("gamma must hold six loss rates (modes 1..6)")
        if not all(g > 0 for g in self.gamma):
            raise ValueError("all loss rates must be positive")
        if self.eps3_injected < 0:
            raise ValueError("injected-signal amplitude must be >= 0")

    @classmethod
    def symmetric(cls, chi: float = 0.01, gamma: float = 1.0,
                  eps: float = 0.0, eps3: float = 0.0) -> "SystemParams":
        """Fully symmetric configuration: chi1 = chi2, equal losses, equal pumps."""
        return cls(chi1=chi, chi2=chi, gamma=(gamma,) * 6,
                   eps1=eps, eps2=eps, eps3_injected=eps3)

    @property
    def is_symmetric(self) -> bool:
        return (self.chi1 == self.chi2
                and len(set(self.gamma)) == 1
                and self.eps1 == self.eps2)

    def gamma_of(self, mode: int) -> float:
        return self.gamma[mode - 1]

    def with_pump(self, eps: float) -> "SystemParams":
        return replace(self, eps1=eps, eps2=eps)

    def to_dict(self) -> dict:
        d = {f"gamma{i}": g for i, g in enumerate(self.gamma, start=1)}
        d.update(chi1=self.chi1, chi2=self.chi2, eps1=self.eps1,
                 eps2=self.eps2, eps3=self.eps3_injected)
        return d


# Configuration keys accepted by load_params, with defaults.  "gamma" is a
# shorthand setting all six loss rates at once.
_PARAM_KEYS = ("chi1", "chi2", "gamma", "gamma1", "gamma2", "gamma3",
               "gamma4", "gamma5", "gamma6", "eps1", "eps2", "eps3")


def params_from_dict(cfg: dict) -> SystemParams:
    """Build SystemParams from a flat key-value mapping.

    Unknown keys are rejected rather than ignored so that typos in a
    configuration file cannot silently fall back to defaults.
    """
    unknown = sorted(set(cfg) - set(_PARAM_KEYS))
    if unknown:
        raise ValueError(f"unknown parameter keys: {', '.join(unknown)}")
    base = float(cfg.get("gamma", 1.0))
    gamma = tuple(float(cfg.get(f"gamma{i}", base)) for i in range(1, 7))
    return SystemParams(
        chi1=float(cfg.get("chi1", 0.01)),
        chi2=float(cfg.get("chi2", 0.01)),
        gamma=gamma,
        eps1=float(cfg.get("eps1", 0.0)),
        eps2=float(cfg.get("eps2", 0.0)),
        eps3_injected=float(cfg.get("eps3", 0.0)),
    )


def load_params(path: str | Path) -> SystemParams:
    """Load SystemParams from a TOML or JSON file (chosen by extension)."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    elif path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    else:
        raise ValueError(f"unsupported parameter-file format: {path.suffix!r}")
    if not isinstance(cfg, dict):
        raise ValueError("parameter file must hold a table of key-value pairs")
    return params_from_dict(cfg)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CouplingGraph:
    """Coupling graph G of the three down-conversion processes and the
    weighted adjacency A of the target square cluster state.

    Both matrices are indexed over the low modes in the order (3, 4, 5, 6).
    G is the adjacency of the path 3-6-5-4; its eigenvalues are the
    golden-ratio pair +/-C1, +/-C2.
    """

    g: np.ndarray = field(repr=False)
    a_cluster: np.ndarray = field(repr=False)

    def g_entry(self, mode_i: int, mode_j: int) -> int:
        return int(self.g[mode_i - 3, mode_j - 3])

    def a_entry(self, mode_i: int, mode_j: int) -> float:
        return float(self.a_cluster[mode_i - 3, mode_j - 3])

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for i in range(4):
            for j in range(i + 1, 4):
                if self.g[i, j]:
                    out.append((i + 3, j + 3))
        return tuple(out)


def build_graph_matrices() -> CouplingGraph:
    """The printed coupling matrix G and weighted cluster adjacency A."""
    g = np.array([
        [0, 0, 0, 1],
        [0, 0, 1, 0],
        [0, 1, 0, 1],
        [1, 0, 1, 0],
    ])
    s5 = math.sqrt(5.0)
    a = 0.5 * np.array([
        [0.0, 0.0, 1.0, s5],
        [0.0, 0.0, s5, 1.0],
        [1.0, s5, 0.0, 0.0],
        [s5, 1.0, 0.0, 0.0],
    ])
    return CouplingGraph(g=_readonly(g), a_cluster=_readonly(a))


def critical_pump(params: SystemParams) -> float:
    """Pump amplitude at which the oscillation threshold is reached.

    Only derived for the fully symmetric configuration; asymmetric
    parameters are rejected.  Equals gamma^2 / (chi * C2), i.e. 61.803...
    for chi = 0.01 and gamma = 1.
    """
    if not params.is_symmetric:
        raise AsymmetricParameters(
            "critical pump formula requires chi1 == chi2, equal losses "
            "and equal pump amplitudes")
    gamma = params.gamma[0]
    return (gamma ** 2 / params.chi1) * 2.0 / (1.0 + math.sqrt(5.0))
