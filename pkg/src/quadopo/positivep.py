"""Positive-P stochastic trajectories of the full six-mode system.

Each trajectory carries 12 independent complex fields in the ordering
(a1, a1+, a2, a2+, ..., a6, a6+); the conjugate fields are NOT constrained
to be complex conjugates, which is what lets ensemble averages of
(a_j+)^m a_i^n reproduce normally-ordered operator moments exactly.

The Ito equations are integrated with fixed-step Euler-Maruyama.  The
twelve real unit-variance noises eta_1..eta_12 enter through the pairwise
combinations sqrt(chi1 a1 / 2)(eta_a +/- i eta_b) etc. that factorize the
interaction diffusion matrix; complex square roots take the principal
branch.  Without a cavity the pump, loss and injection terms are dropped
but the interaction noise remains.

Reproducibility: trajectory k draws its noise from the k-th child of
SeedSequence(seed), so results are bit-identical for a given
(seed, params, dt, n_traj) regardless of chunking or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (SystemParams, alpha_index, alpha_plus_index,
                   quadrature_transform)


class DivergedTrajectory(RuntimeError):
    """Too many trajectories escaped past the divergence bound."""


class InsufficientTrajectories(RuntimeError):
    """A requested moment's standard error exceeds its configured budget."""


@dataclass(frozen=True)
class PhaseSpacePoint:
    """One positive-P sample: six alpha and six independent alpha+ fields."""

    alpha: np.ndarray
    alpha_plus: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        ap = np.asarray(self.alpha_plus, dtype=complex)
        if a.shape != (6,) or ap.shape != (6,):
            raise ValueError("alpha and alpha_plus must be 6-vectors")
        a.setflags(write=False)
        ap.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "alpha_plus", ap)

    def to_vector(self) -> np.ndarray:
        v = np.empty(12, dtype=complex)
        v[0::2] = self.alpha
        v[1::2] = self.alpha_plus
        return v

    @classmethod
    def from_vector(cls, v) -> "PhaseSpacePoint":
        v = np.asarray(v, dtype=complex)
        return cls(alpha=v[0::2], alpha_plus=v[1::2])

    @classmethod
    def coherent_pumps(cls, alpha1: complex, alpha2: complex) -> "PhaseSpacePoint":
        """Coherent pumps, vacuum low modes: alpha+ = alpha* at t = 0."""
        a = np.zeros(6, dtype=complex)
        a[0], a[1] = alpha1, alpha2
        return cls(alpha=a, alpha_plus=a.conj())


@dataclass(frozen=True)
class SimConfig:
    """Ensemble integration controls.

    cavity=False drops pump, loss and injection terms (interaction-only
    dynamics); freeze_pumps holds the four pump components at their
    initial values, which makes the low-mode sector exactly linear.
    """

    n_traj: int
    dt: float
    t_final: float
    seed: int
    cavity: bool = False
    freeze_pumps: bool = False
    alpha1_0: complex = 0j
    alpha2_0: complex = 0j
    n_frames: int = 51
    divergence_bound: float = 1e12
    max_discard_fraction: float = 0.05
    chunk_size: int = 4096
    noise_window: int = 32
    check_every: int = 8

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")
        if self.dt <= 0 or self.t_final <= 0:
            raise ValueError("dt and t_final must be positive")
        if self.n_frames < 2:
            raise ValueError("need at least the initial and final frames")

    def with_scale(self, n_traj: int) -> "SimConfig":
        return replace(self, n_traj=n_traj)


def drift(states: np.ndarray, params: SystemParams, *, cavity: bool,
          freeze_pumps: bool = False) -> np.ndarray:
    """Deterministic part of the Ito equations, vectorized over leading axes.

    states[..., k] follows the 12-component phase-space ordering.
    """
    v = np.asarray(states, dtype=complex)
    a1, a1p, a2, a2p = v[..., 0], v[..., 1], v[..., 2], v[..., 3]
    a3, a3p, a4, a4p = v[..., 4], v[..., 5], v[..., 6], v[..., 7]
    a5, a5p, a6, a6p = v[..., 8], v[..., 9], v[..., 10], v[..., 11]
    chi1, chi2 = params.chi1, params.chi2

    d = np.empty_like(v)
    d[..., 0] = -chi1 * (a4 * a5 + a3 * a6)
    d[..., 1] = -chi1 * (a4p * a5p + a3p * a6p)
    d[..., 2] = -chi2 * a5 * a6
    d[..., 3] = -chi2 * a5p * a6p
    d[..., 4] = chi1 * a1 * a6p
    d[..., 5] = chi1 * a1p * a6
    d[..., 6] = chi1 * a1 * a5p
    d[..., 7] = chi1 * a1p * a5
    d[..., 8] = chi1 * a1 * a4p + chi2 * a2 * a6p
    d[..., 9] = chi1 * a1p * a4 + chi2 * a2p * a6
    d[..., 10] = chi1 * a1 * a3p + chi2 * a2 * a5p
    d[..., 11] = chi1 * a1p * a3 + chi2 * a2p * a5

    if cavity:
        g = params.gamma
        d[..., 0] += params.eps1 - g[0] * a1
        d[..., 1] += params.eps1 - g[0] * a1p
        d[..., 2] += params.eps2 - g[1] * a2
        d[..., 3] += params.eps2 - g[1] * a2p
        eps3 = params.eps3_injected
        d[..., 4] += eps3 - g[2] * a3
        d[..., 5] += eps3 - g[2] * a3p
        d[..., 6] += -g[3] * a4
        d[..., 7] += -g[3] * a4p
        d[..., 8] += -g[4] * a5
        d[..., 9] += -g[4] * a5p
        d[..., 10] += -g[5] * a6
        d[..., 11] += -g[5] * a6p
    if freeze_pumps:
        d[..., 0:4] = 0.0
    return d


def drift_free(states: np.ndarray, params: SystemParams) -> np.ndarray:
    """Interaction-only drift (pump and loss terms removed)."""
    return drift(states, params, cavity=False)


def noise_increments(states: np.ndarray, eta: np.ndarray,
                     params: SystemParams) -> np.ndarray:
    """Stochastic increment per unit sqrt(dt) for standard normals eta.

    eta[..., k] holds eta_{k+1}; the alpha sector uses eta_{1,2,5,6,9,10}
    and the conjugate sector the eta_{i+2} partners.
    """
    v = np.asarray(states, dtype=complex)
    s1 = np.sqrt(0.5 * params.chi1 * v[..., 0])
    s1p = np.sqrt(0.5 * params.chi1 * v[..., 1])
    s2 = np.sqrt(0.5 * params.chi2 * v[..., 2])
    s2p = np.sqrt(0.5 * params.chi2 * v[..., 3])

    def e(k):
        return eta[..., k - 1]

    n = np.zeros_like(v)
    n[..., 4] = s1 * (e(9) + 1j * e(10))
    n[..., 5] = s1p * (e(11) + 1j * e(12))
    n[..., 6] = s1 * (e(5) + 1j * e(6))
    n[..., 7] = s1p * (e(7) + 1j * e(8))
    n[..., 8] = s1 * (e(5) - 1j * e(6)) + s2 * (e(1) + 1j * e(2))
    n[..., 9] = s1p * (e(7) - 1j * e(8)) + s2p * (e(3) + 1j * e(4))
    n[..., 10] = s1 * (e(9) - 1j * e(10)) + s2 * (e(1) - 1j * e(2))
    n[..., 11] = s1p * (e(11) - 1j * e(12)) + s2p * (e(3) - 1j * e(4))
    return n


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Recorded frames of a positive-P run plus divergence bookkeeping.

    states has shape (n_frames, n_traj, 12); alive marks trajectories that
    stayed inside the divergence bound for the whole run and is the set
    every moment estimate averages over.
    """

    params: SystemParams
    config: SimConfig
    time_grid: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    alive: np.ndarray = field(repr=False)
    segment: int = 0

    @property
    def n_traj(self) -> int:
        return self.states.shape[1]

    @property
    def n_discarded(self) -> int:
        return int(self.n_traj - self.alive.sum())

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def dt(self) -> float:
        return self.config.dt

    def surviving(self, frame: int) -> np.ndarray:
        """(n_alive, 12) state array at the given frame index."""
        return self.states[frame][self.alive]


def _frame_steps(n_steps: int, n_frames: int) -> np.ndarray:
    return np.unique(np.round(np.linspace(0, n_steps, n_frames)).astype(int))


def _trajectory_seeds(seed: int, segment: int, n_traj: int):
    # Each (seed, segment) pair owns a disjoint substream namespace; the
    # k-th trajectory always draws from the k-th child.
    return np.random.SeedSequence((seed, segment)).spawn(n_traj)


def _integrate(params: SystemParams, config: SimConfig, v0: np.ndarray,
               alive0: np.ndarray, segment: int,
               t_offset: float) -> TrajectoryEnsemble:
    n_steps = max(1, round(config.t_final / config.dt))
    dt = config.t_final / n_steps
    sqdt = math.sqrt(dt)
    frame_steps = _frame_steps(n_steps, config.n_frames)
    time_grid = t_offset + frame_steps * dt
    frame_of_step = {s: i for i, s in enumerate(frame_steps)}

    states = np.empty((len(frame_steps), config.n_traj, 12), dtype=complex)
    alive_all = alive0.copy()
    children = _trajectory_seeds(config.seed, segment, config.n_traj)
    window = max(1, config.noise_window)

    for lo in range(0, config.n_traj, config.chunk_size):
        hi = min(lo + config.chunk_size, config.n_traj)
        n = hi - lo
        gens = [np.random.Generator(np.random.Philox(children[k]))
                for k in range(lo, hi)]
        v = v0[lo:hi].copy()
        alive = alive_all[lo:hi].copy()
        if 0 in frame_of_step:
            states[frame_of_step[0], lo:hi] = v
        check_every = max(1, config.check_every)

        def prune():
            # Freeze anything outside the bound; later drift evaluations on
            # frozen rows are discarded, so occasional checks suffice.
            with np.errstate(invalid="ignore"):
                bad = ~np.isfinite(v).all(axis=1)
                bad |= np.abs(v).max(axis=1) > config.divergence_bound
            alive[bad] = False

        step = 0
        noise = np.empty((n, window, 12))
        while step < n_steps:
            w = min(window, n_steps - step)
            for i, g in enumerate(gens):
                g.standard_normal(out=noise[i, :w])
            for k in range(w):
                with np.errstate(over="ignore", invalid="ignore"):
                    dv = drift(v, params, cavity=config.cavity,
                               freeze_pumps=config.freeze_pumps) * dt
                    dv += noise_increments(v, noise[:, k], params) * sqdt
                    if alive.all():
                        v += dv
                    else:
                        v += np.where(alive[:, None], dv, 0.0)
                step += 1
                if step % check_every == 0 or step == n_steps:
                    prune()
                if step in frame_of_step:
                    states[frame_of_step[step], lo:hi] = v
        alive_all[lo:hi] = alive

    discarded = int(config.n_traj - alive_all.sum())
    if discarded > config.max_discard_fraction * config.n_traj:
        raise DivergedTrajectory(
            f"{discarded} of {config.n_traj} trajectories exceeded the "
            f"divergence bound {config.divergence_bound:g}")
    return TrajectoryEnsemble(params=params, config=config,
                              time_grid=time_grid, states=states,
                              alive=alive_all, segment=segment)


def simulate(params: SystemParams, config: SimConfig) -> TrajectoryEnsemble:
    """Integrate the Ito equations for an ensemble of trajectories.

    Initial condition: coherent pumps (alpha1_0, alpha2_0), vacuum low
    modes.  Raises DivergedTrajectory if more than max_discard_fraction of
    the ensemble escapes the divergence bound.
    """
    v0 = PhaseSpacePoint.coherent_pumps(config.alpha1_0, config.alpha2_0).to_vector()
    return _integrate(params, config, np.tile(v0, (config.n_traj, 1)),
                      np.ones(config.n_traj, dtype=bool), segment=0,
                      t_offset=0.0)


def _params_hash(params: SystemParams, dt: float) -> str:
    import hashlib
    import json

    payload = json.dumps({**params.to_dict(), "dt": dt}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


CHECKPOINT_FORMAT = 1


def write_checkpoint(path, ens: TrajectoryEnsemble) -> None:
    """Persist the final frame of a run so it can be extended later.

    Binary npz layout: format version, params hash, seed, dt, the segment
    counter and absolute time of the stored frame, the full state array
    and the alive mask.
    """
    np.savez_compressed(
        path,
        format=np.int64(CHECKPOINT_FORMAT),
        params_hash=np.bytes_(_params_hash(ens.params, ens.dt).encode()),
        seed=np.int64(ens.seed),
        dt=float(ens.dt),
        segment=np.int64(ens.segment),
        t_checkpoint=float(ens.time_grid[-1]),
        states=ens.states[-1],
        alive=ens.alive,
    )


def resume_from_checkpoint(path, params: SystemParams,
                           config: SimConfig) -> TrajectoryEnsemble:
    """Continue a checkpointed run for a further config.t_final.

    The continuation draws from the next segment's substream namespace,
    so a resumed run is itself deterministic.  Raises ValueError on a
    params/seed/dt mismatch with the stored header.
    """
    with np.load(path) as ck:
        if int(ck["format"]) != CHECKPOINT_FORMAT:
            raise ValueError("unsupported checkpoint format version")
        if bytes(ck["params_hash"]).decode() != _params_hash(params, config.dt):
            raise ValueError("checkpoint was written with different "
                             "parameters or step size")
        if int(ck["seed"]) != config.seed:
            raise ValueError("checkpoint seed does not match config.seed")
        states = np.array(ck["states"])
        alive = np.array(ck["alive"])
        segment = int(ck["segment"])
        t_offset = float(ck["t_checkpoint"])
    if states.shape[0] != config.n_traj:
        raise ValueError("checkpoint trajectory count does not match config")
    return _integrate(params, config, states, alive, segment=segment + 1,
                      t_offset=t_offset)


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    stderr: float
    n_traj: int

    @property
    def real(self) -> float:
        return float(self.value.real)


def _mean_stderr(samples: np.ndarray) -> tuple[complex, float]:
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n < 2:
        return complex(mean), 0.0
    var = samples.real.var(axis=0, ddof=1) + samples.imag.var(axis=0, ddof=1)
    return complex(mean), float(np.sqrt(var / n))


def estimate_moments(ens: TrajectoryEnsemble, monomials, frame: int = -1,
                     max_stderr: float | None = None) -> list[MomentEstimate]:
    """Ensemble averages of phase-space monomials at one recorded frame.

    Each monomial is a mapping mode -> (m, n) standing for the product of
    (a_mode+)^m a_mode^n; the average estimates the normally-ordered moment
    <(a+)^m a^n>.  Raises InsufficientTrajectories when a standard error
    exceeds max_stderr.
    """
    v = ens.states[frame][ens.alive]
    if v.shape[0] == 0:
        raise InsufficientTrajectories("no surviving trajectories")
    out = []
    for mono in monomials:
        w = np.ones(v.shape[0], dtype=complex)
        for mode, (m_plus, n_plain) in mono.items():
            if m_plus:
                w *= v[:, alpha_plus_index(mode)] ** m_plus
            if n_plain:
                w *= v[:, alpha_index(mode)] ** n_plain
        value, stderr = _mean_stderr(w)
        if max_stderr is not None and stderr > max_stderr:
            raise InsufficientTrajectories(
                f"moment {mono!r}: stderr {stderr:.3e} exceeds budget "
                f"{max_stderr:.3e} with {v.shape[0]} trajectories")
        out.append(MomentEstimate(value=value, stderr=stderr,
                                  n_traj=v.shape[0]))
    return out


def intensities(ens: TrajectoryEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Mean photon numbers Re<a+ a> per mode, shape (n_frames, 6), with
    standard errors."""
    v = ens.states[:, ens.alive, :]
    prods = v[:, :, 0::2] * v[:, :, 1::2]  # a * a+ per mode, c-numbers commute
    n = prods.shape[1]
    values = prods.mean(axis=1).real
    stderr = prods.real.std(axis=1, ddof=1) / math.sqrt(n)
    return values, stderr


def manley_rowe(ens: TrajectoryEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Conserved combination 2 N1 + 2 N2 + N3 + N4 + N5 + N6 over time."""
    v = ens.states[:, ens.alive, :]
    prods = v[:, :, 0::2] * v[:, :, 1::2]
    weights = np.array([2.0, 2.0, 1.0, 1.0, 1.0, 1.0])
    total = prods @ weights
    n = total.shape[1]
    return (total.mean(axis=1).real,
            total.real.std(axis=1, ddof=1) / math.sqrt(n))


def quadrature_covariance(ens: TrajectoryEnsemble, frame: int = -1):
    """Symmetrically-ordered 8x8 quadrature covariance of modes 3..6.

    Normally-ordered phase-space moments acquire the vacuum term on the
    diagonal, so cov = Re(mean(q q^T) - mean(q) mean(q)^T) + identity with
    q the c-number quadratures of one trajectory.  Returns
    (cov, cov_stderr, mean, mean_stderr); standard errors are per entry
    over trajectories (delta-method for the centered products).
    """
    v = ens.states[frame][ens.alive]
    n = v.shape[0]
    t8 = quadrature_transform()
    q = v[:, 4:] @ t8.T
    mean = q.mean(axis=0)
    centered = q - mean
    prods = centered[:, :, None] * centered[:, None, :]
    cov = prods.mean(axis=0).real + np.eye(8)
    if n > 1:
        cov_stderr = prods.real.std(axis=0, ddof=1) / math.sqrt(n)
        mean_stderr = np.sqrt(
            (q.real.var(axis=0, ddof=1) + q.imag.var(axis=0, ddof=1)) / n)
    else:
        cov_stderr = np.zeros((8, 8))
        mean_stderr = np.zeros(8)
    return cov, cov_stderr, mean.real, mean_stderr


def joint_variances(ens: TrajectoryEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Variances of the four squeezed joint operators over all frames.

    Returns (values, stderr) of shape (n_frames, 4); the vacuum term
    |c|^2 per operator is the ordering correction.
    """
    from .undepleted import JOINT_OPERATORS

    v = ens.states[:, ens.alive, 4:]
    t8 = quadrature_transform()
    q = v @ t8.T
    coeffs = np.stack([op.full_coeffs() for op in JOINT_OPERATORS])
    s = q @ coeffs.T  # (frames, n, 4)
    centered = s - s.mean(axis=1, keepdims=True)
    sq = centered ** 2
    n = sq.shape[1]
    vacuum = (coeffs ** 2).sum(axis=1)
    values = sq.mean(axis=1).real + vacuum
    stderr = sq.real.std(axis=1, ddof=1) / math.sqrt(n)
    return values, stderr


def joint_operator_variances_cavity(params: SystemParams, config: SimConfig):
    """Intracavity V(O_i)(t): runs simulate with the cavity on.

    Returns (time_grid, values, stderr, ensemble)."""
    ens = simulate(params, replace(config, cavity=True))
    values, stderr = joint_variances(ens)
    return ens.time_grid, values, stderr, ens


def vlf_from_ensemble(ens: TrajectoryEnsemble, frame: int = -1):
    """Optimized VLF report from the ensemble covariance at one frame,
    with propagated standard errors."""
    from .vlf import vlf_correlations

    cov, cov_stderr, _, _ = quadrature_covariance(ens, frame)
    return vlf_correlations(cov, cov_stderr=cov_stderr)
