"""Optimized van Loock-Furusawa correlations for quadripartite entanglement.

The three witnesses are sums of two variances of quadrature combinations
over modes 3..6; simultaneous violation of all three bounds (each value
below 4 with the vacuum normalized to variance 1) certifies genuine
quadripartite entanglement.  The gain parameters g3..g6 minimizing the
first two combinations have closed forms in the Y-sector covariances;
the third combination reuses g3 and g4.

Any symmetric 8x8 second-moment matrix in the (X3, Y3, ..., X6, Y6)
ordering is accepted, so the same code evaluates time-domain covariance
states, stochastic moment estimates and per-frequency output spectra.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import x_index, y_index

VLF_BOUND = 4.0

# Gain layout of the three combinations: I36 carries (g4, g5), I45 carries
# (g3, g6), I56 carries (g3, g4); the unit-weight positions are fixed.
_COMBOS = (
    ("I36", (3, 6), {3: None, 4: "g4", 5: "g5", 6: None}),
    ("I45", (4, 5), {3: "g3", 4: None, 5: None, 6: "g6"}),
    ("I56", (5, 6), {3: "g3", 4: "g4", 5: None, 6: None}),
)


class DegenerateCovariance(RuntimeError):
    """Gain optimization is singular: a closed-form denominator vanished."""


@dataclass(frozen=True)
class VlfGains:
    g3: float
    g4: float
    g5: float
    g6: float

    def as_dict(self) -> dict:
        return {"g3": self.g3, "g4": self.g4, "g5": self.g5, "g6": self.g6}


@dataclass(frozen=True)
class VlfReport:
    """The three correlation values, the gains used, and the strict
    all-three-below-4 entanglement flag.  Standard errors are present
    when the input carried statistical uncertainty."""

    i36: float
    i45: float
    i56: float
    gains: VlfGains
    entangled: bool
    stderr_i36: float | None = None
    stderr_i45: float | None = None
    stderr_i56: float | None = None

    def values(self) -> tuple[float, float, float]:
        return (self.i36, self.i45, self.i56)

    def to_dict(self) -> dict:
        d = {"I36": self.i36, "I45": self.i45, "I56": self.i56}
        d.update(self.gains.as_dict())
        d["entangled"] = self.entangled
        if self.stderr_i36 is not None:
            d.update(stderr_I36=self.stderr_i36, stderr_I45=self.stderr_i45,
                     stderr_I56=self.stderr_i56)
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _as_matrix(cov) -> np.ndarray:
    """Accept a CovarianceState-like object or a bare 8x8 array."""
    m = np.asarray(getattr(cov, "cov", cov), dtype=float)
    if m.shape != (8, 8):
        raise ValueError("expected an 8x8 second-moment matrix")
    return m


def _y_cov(m: np.ndarray, i: int, j: int) -> float:
    return m[y_index(i), y_index(j)]


def optimized_gains(cov, tol: float = 1e-12) -> VlfGains:
    """Closed-form gains minimizing the first two correlations.

    Uses only Y-sector covariances V_ij.  Raises DegenerateCovariance when
    V36^2 - V3*V6 or V45^2 - V4*V5 falls below tol in magnitude.
    """
    m = _as_matrix(cov)
    v = {(i, j): _y_cov(m, i, j) for i in (3, 4, 5, 6) for j in (3, 4, 5, 6)}
    den36 = v[3, 6] ** 2 - v[3, 3] * v[6, 6]
    den45 = v[4, 5] ** 2 - v[4, 4] * v[5, 5]
    if abs(den36) < tol or abs(den45) < tol:
        raise DegenerateCovariance(
            f"gain denominators too small: V36^2-V3V6={den36:.3e}, "
            f"V45^2-V4V5={den45:.3e}")
    g3 = (v[6, 6] * (v[3, 4] + v[3, 5]) - v[3, 6] * (v[4, 6] + v[5, 6])) / den36
    g4 = (v[5, 5] * (v[3, 4] + v[4, 6]) - v[4, 5] * (v[3, 5] + v[5, 6])) / den45
    g5 = (v[4, 4] * (v[3, 5] + v[5, 6]) - v[4, 5] * (v[3, 4] + v[4, 6])) / den45
    g6 = (v[3, 3] * (v[4, 6] + v[5, 6]) - v[3, 6] * (v[3, 4] + v[3, 5])) / den36
    return VlfGains(g3=g3, g4=g4, g5=g5, g6=g6)


def combo_vectors(gains: VlfGains) -> list[tuple[np.ndarray, np.ndarray]]:
    """The (X-combo, Y-combo) coefficient 8-vectors of the three witnesses."""
    gmap = gains.as_dict()
    out = []
    for _, (mi, mj), ycoeffs in _COMBOS:
        cx = np.zeros(8)
        cx[x_index(mi)] = 1.0
        cx[x_index(mj)] = -1.0
        cy = np.zeros(8)
        for mode, gname in ycoeffs.items():
            cy[y_index(mode)] = 1.0 if gname is None else gmap[gname]
        out.append((cx, cy))
    return out


def _quadratic(c: np.ndarray, m: np.ndarray) -> float:
    return float(c @ m @ c)


def _propagated_stderr(c_pairs, stderr: np.ndarray) -> list[float]:
    # Linear error propagation through the quadratic form, entries treated
    # as independent: var(I) = sum_ab (c_a c_b)^2 stderr_ab^2 over both combos.
    out = []
    for cx, cy in c_pairs:
        var = 0.0
        for c in (cx, cy):
            w = np.outer(c, c)
            var += float(np.sum((w * stderr) ** 2))
        out.append(np.sqrt(var))
    return out


def vlf_correlations(cov, gains: VlfGains | None = None,
                     cov_stderr: np.ndarray | None = None) -> VlfReport:
    """Evaluate the three correlations as quadratic forms in the input.

    gains=None computes the optimized closed forms first.  When a matrix
    of per-entry standard errors is supplied, each I value carries a
    propagated standard error.
    """
    m = _as_matrix(cov)
    if gains is None:
        gains = optimized_gains(m)
    pairs = combo_vectors(gains)
    values = [_quadratic(cx, m) + _quadratic(cy, m) for cx, cy in pairs]
    errs = (None, None, None)
    if cov_stderr is not None:
        errs = _propagated_stderr(pairs, np.asarray(cov_stderr, dtype=float))
    i36, i45, i56 = values
    return VlfReport(i36=i36, i45=i45, i56=i56, gains=gains,
                     entangled=bool(max(values) < VLF_BOUND),
                     stderr_i36=errs[0], stderr_i45=errs[1], stderr_i56=errs[2])
