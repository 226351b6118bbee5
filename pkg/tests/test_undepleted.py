import numpy as np
import pytest

import quadopo as q
from quadopo import undepleted as u
from quadopo.core import symplectic_form

from conftest import rk4


def propagator_oracle(p, n_steps=4000):
    """Fundamental matrix of dq/dt = M q by hand-rolled RK4 integration."""
    gen = u.quadrature_generator(p)
    cols = [rk4(lambda y: gen @ y, col, p.t, n_steps)
            for col in np.eye(8, dtype=complex)]
    return np.stack(cols, axis=1).real


class TestPropagator:
    def test_identity_at_t0(self):
        s = u.heisenberg_propagator(u.UndepletedParams(1.3, 0.7, t=0.0))
        assert np.abs(s - np.eye(8)).max() < 1e-15

    def test_symplectic_random(self):
        om = symplectic_form()
        rng = np.random.default_rng(1)
        for _ in range(25):
            p = u.UndepletedParams(rng.uniform(0, 2), rng.uniform(0, 2),
                                   t=rng.uniform(0, 5))
            s = u.heisenberg_propagator(p)
            assert np.abs(s @ om @ s.T - om).max() < 1e-10

    def test_symplectic_printed_example(self):
        om = symplectic_form()
        s = u.heisenberg_propagator(u.UndepletedParams(1.0, 1.0, t=0.7))
        assert np.abs(s @ om @ s.T - om).max() < 1e-12

    def test_group_property(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            xi1, xi2 = rng.uniform(0, 2, 2)
            t1, t2 = rng.uniform(0, 2.5, 2)
            s1 = u.heisenberg_propagator(u.UndepletedParams(xi1, xi2, t=t1))
            s2 = u.heisenberg_propagator(u.UndepletedParams(xi1, xi2, t=t2))
            s12 = u.heisenberg_propagator(u.UndepletedParams(xi1, xi2, t=t1 + t2))
            assert np.abs(s12 - s2 @ s1).max() < 1e-10

    def test_decaying_eigencombo(self):
        # The X-sector combo (-c1, c1, -1, 1) is a G-eigenvector with
        # eigenvalue -c2, so S(1) scales it by exp(-c2).
        s = u.heisenberg_propagator(u.UndepletedParams(1.0, 1.0, t=1.0))
        c = u.JOINT_OPERATORS[0].full_coeffs()
        assert np.abs(s @ c - np.exp(-q.C2) * c).max() < 1e-12

    def test_against_rk4_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(4):
            p = u.UndepletedParams(rng.uniform(0.2, 1.5),
                                   rng.uniform(0.2, 1.5),
                                   t=rng.uniform(0.3, 2.0))
            assert np.abs(u.heisenberg_propagator(p)
                          - propagator_oracle(p)).max() < 1e-8


class TestCovarianceEvolution:
    def test_vacuum_fixed_at_t0(self):
        vac = u.CovarianceState.vacuum()
        out = u.evolve_covariance(vac, u.UndepletedParams(1.0, 1.0, t=0.0))
        assert np.abs(out.cov - np.eye(8)).max() < 1e-15
        assert np.abs(out.mean).max() == 0.0

    def test_joint_variance_closed_form(self):
        # V(O1) from vacuum at xi*t = 1: 2(1+c1^2) exp(-2 c2).
        vac = u.CovarianceState.vacuum()
        st = u.evolve_covariance(vac, u.UndepletedParams(1.0, 1.0, t=1.0))
        v = st.variance_of(u.JOINT_OPERATORS[0].full_coeffs())
        expected = 2.0 * (1.0 + q.C1 ** 2) * np.exp(-2.0 * q.C2)
        assert v == pytest.approx(expected, rel=1e-12)
        assert 2.0 * (1.0 + q.C1 ** 2) == pytest.approx(2.7639, abs=5e-5)

    def test_covariance_against_rk4_oracle(self):
        vac = u.CovarianceState.vacuum()
        p = u.UndepletedParams(1.0, 0.6, t=1.3)
        st = u.evolve_covariance(vac, p)
        s_oracle = propagator_oracle(p)
        assert np.abs(st.cov - s_oracle @ s_oracle.T).max() < 1e-8

    def test_uncertainty_preserved(self):
        vac = u.CovarianceState.vacuum()
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = u.UndepletedParams(rng.uniform(0, 2), rng.uniform(0, 2),
                                   t=rng.uniform(0, 3))
            st = u.evolve_covariance(vac, p)
            assert st.uncertainty_defect() > -1e-9

    def test_asymmetric_i36_stays_violated(self):
        # xi2 = 0.5 xi1: the optimized first witness stays below 4 on (0, 3].
        from quadopo import vlf
        vac = u.CovarianceState.vacuum()
        for t in np.linspace(0.05, 3.0, 25):
            st = u.evolve_covariance(vac, u.UndepletedParams(1.0, 0.5, t=t))
            rep = vlf.vlf_correlations(st.cov)
            assert rep.i36 < 4.0


class TestJointOperators:
    def test_coefficients_are_graph_eigenvectors(self):
        g = q.build_graph_matrices().g.astype(float)
        # X-sector eigenvalues -c2, -c1; Y-sector the mirrored pair.
        signs = {"X": -1.0, "Y": 1.0}
        for op in u.JOINT_OPERATORS:
            vec = np.array(op.coeffs)
            lam = signs[op.sector] * op.decay
            assert np.abs(g @ vec - lam * vec).max() < 1e-12

    def test_vacuum_values(self):
        vals = u.joint_operator_variances(
            u.UndepletedParams(1.0, 1.0), [0.0])[0]
        v13 = 2.0 * (1.0 + q.C1 ** 2)
        v24 = 2.0 * (1.0 + q.C2 ** 2)
        assert vals == pytest.approx([v13, v24, v13, v24], rel=1e-14)

    def test_pairwise_equality_symmetric(self):
        t_grid = np.linspace(0.0, 3.0, 31)
        vals = u.joint_operator_variances(u.UndepletedParams(0.8, 0.8), t_grid)
        assert np.abs(vals[:, 0] - vals[:, 2]).max() < 1e-12
        assert np.abs(vals[:, 1] - vals[:, 3]).max() < 1e-12

    def test_monotone_decay_to_zero(self):
        t_grid = np.linspace(0.0, 8.0, 200)
        vals = u.joint_operator_variances(u.UndepletedParams(1.0, 1.0), t_grid)
        assert np.all(np.diff(vals, axis=0) < 0)
        assert vals[-1].max() < 1e-4

    def test_exponential_decay_rates(self):
        # log V is affine in t with slopes -2 c2 xi and -2 c1 xi.
        xi = 0.9
        t_grid = np.linspace(0.1, 2.1, 21)
        vals = u.joint_operator_variances(u.UndepletedParams(xi, xi), t_grid)
        for col, rate in ((0, q.C2), (1, q.C1), (2, q.C2), (3, q.C1)):
            slope = np.polyfit(t_grid, np.log(vals[:, col]), 1)[0]
            assert slope == pytest.approx(-2.0 * rate * xi, rel=1e-6)


class TestClusterResiduals:
    def test_vacuum_value(self):
        res = u.cluster_residuals(u.CovarianceState.vacuum())
        assert res == pytest.approx([2.5] * 4, rel=1e-14)

    def test_residuals_vanish_at_large_squeezing(self):
        vac = u.CovarianceState.vacuum()
        st = u.evolve_covariance(vac, u.UndepletedParams(1.0, 1.0, t=6.0))
        assert u.cluster_residuals(st).max() < 1e-3

    def test_identification_with_joint_operators(self):
        # After the mode rotation the nullifier rows are fixed linear
        # combinations of the joint-operator combos:
        #   N1 = (c2 O3 + c1 O4)/2, N2 = (c2 O3 - c1 O4)/2,
        #   N3 = (O2 - O1)/2,       N4 = (O1 + O2)/2,
        # and the combos are mutually orthogonal eigenvectors, so the
        # residual variances are the matching combinations of V(O_i).
        vac = u.CovarianceState.vacuum()
        for t in (0.0, 0.4, 1.1, 2.0):
            st = u.evolve_covariance(vac, u.UndepletedParams(1.0, 1.0, t=t))
            res = u.cluster_residuals(st)
            v = u.joint_operator_variances(
                u.UndepletedParams(1.0, 1.0), [t])[0]
            expected = np.array([
                (q.C2 ** 2 * v[2] + q.C1 ** 2 * v[3]) / 4.0,
                (q.C2 ** 2 * v[2] + q.C1 ** 2 * v[3]) / 4.0,
                (v[0] + v[1]) / 4.0,
                (v[0] + v[1]) / 4.0,
            ])
            assert res == pytest.approx(expected, rel=1e-10)


class TestParams:
    def test_rejects_negative_couplings(self):
        with pytest.raises(ValueError):
            u.UndepletedParams(-0.1, 1.0)

    def test_squeezing_parameter(self):
        p = u.UndepletedParams(0.8, 0.8, t=2.0)
        assert p.r == pytest.approx(1.6)
        with pytest.raises(ValueError):
            _ = u.UndepletedParams(0.8, 0.4, t=2.0).r
