"""Entanglement and cluster-state analysis of a single OPO with four
concurrent down-conversion channels: analytic undepleted-pump evolution,
positive-P stochastic trajectories, linearized output spectra and
optimized van Loock-Furusawa witnesses."""

__version__ = "0.1.0"

from .core import (C1, C2, CouplingGraph, QuadratureConvention, SystemParams,
                   build_graph_matrices, critical_pump, load_params,
                   params_from_dict)
from .undepleted import (CovarianceState, JOINT_OPERATORS, UndepletedParams,
                         cluster_residuals, evolve_covariance,
                         heisenberg_propagator, joint_operator_variances)
from .vlf import (DegenerateCovariance, VlfGains, VlfReport, optimized_gains,
                  vlf_correlations)
from .positivep import (DivergedTrajectory, InsufficientTrajectories,
                        MomentEstimate, PhaseSpacePoint, SimConfig,
                        TrajectoryEnsemble, drift_free, estimate_moments,
                        joint_operator_variances_cavity, simulate)
from .linearized import (LinearizedModel, NoConvergence, PhaseDiffusionRisk,
                         SpectrumSeries, UnstableModel, assemble,
                         eigenvalues_below_threshold, intracavity_spectrum,
                         output_spectra, steady_state, threshold_scan)

__all__ = [
    "C1", "C2", "CouplingGraph", "QuadratureConvention", "SystemParams",
    "build_graph_matrices", "critical_pump", "load_params",
    "params_from_dict",
    "CovarianceState", "JOINT_OPERATORS", "UndepletedParams",
    "cluster_residuals", "evolve_covariance", "heisenberg_propagator",
    "joint_operator_variances",
    "DegenerateCovariance", "VlfGains", "VlfReport", "optimized_gains",
    "vlf_correlations",
    "DivergedTrajectory", "InsufficientTrajectories", "MomentEstimate",
    "PhaseSpacePoint", "SimConfig", "TrajectoryEnsemble", "drift_free",
    "estimate_moments", "joint_operator_variances_cavity", "simulate",
    "LinearizedModel", "NoConvergence", "PhaseDiffusionRisk",
    "SpectrumSeries", "UnstableModel", "assemble",
    "eigenvalues_below_threshold", "intracavity_spectrum", "output_spectra",
    "steady_state", "threshold_scan",
]
