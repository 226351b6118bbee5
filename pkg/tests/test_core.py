import json
import math

import numpy as np
import pytest

import quadopo as q
from quadopo.core import (AsymmetricParameters, load_params, params_from_dict,
                          symplectic_form, x_index, y_index)

GOLDEN = math.sqrt(5.0)


class TestGoldenPair:
    def test_product_and_difference(self):
        assert q.C1 * q.C2 == pytest.approx(1.0, abs=1e-15)
        assert q.C2 - q.C1 == pytest.approx(1.0, abs=1e-15)


class TestCouplingGraph:
    def test_printed_entries(self):
        g = q.build_graph_matrices()
        assert g.g_entry(3, 6) == 1
        assert g.g_entry(3, 4) == 0
        assert g.g_entry(4, 5) == 1
        assert g.g_entry(5, 6) == 1
        assert g.g_entry(3, 5) == 0
        assert g.g_entry(4, 6) == 0

    def test_symmetry_and_diagonal(self):
        g = q.build_graph_matrices()
        assert np.array_equal(g.g, g.g.T)
        assert np.all(np.diag(g.g) == 0)
        assert set(np.unique(g.g)) <= {0, 1}
        assert g.edges == ((3, 6), (4, 5), (5, 6))

    def test_spectrum_is_golden_pair(self):
        # Independent numeric eigensolver against the closed-form pair.
        g = q.build_graph_matrices()
        eig = np.sort(np.linalg.eigvalsh(g.g.astype(float)))
        expected = np.sort([q.C2, q.C1, -q.C1, -q.C2])
        assert np.abs(eig - expected).max() < 1e-12

    def test_cluster_adjacency(self):
        g = q.build_graph_matrices()
        a = g.a_cluster
        assert np.array_equal(a, a.T)
        assert np.all(np.diag(a) == 0)
        assert g.a_entry(3, 5) == pytest.approx(0.5)
        assert g.a_entry(3, 6) == pytest.approx(GOLDEN / 2)
        assert set(np.round(np.unique(a), 12)) == {
            0.0, 0.5, round(GOLDEN / 2, 12)}


class TestQuadratureConvention:
    def test_vacuum_is_identity(self):
        conv = q.QuadratureConvention()
        assert np.array_equal(conv.vacuum_covariance(), np.eye(8))

    def test_symplectic_form_blocks(self):
        om = symplectic_form()
        assert om.shape == (8, 8)
        for mode in (3, 4, 5, 6):
            assert om[x_index(mode), y_index(mode)] == 1.0
            assert om[y_index(mode), x_index(mode)] == -1.0
        assert np.array_equal(om, -om.T)


class TestCriticalPump:
    def test_published_value(self, sym_params):
        # gamma^2/chi * 2/(1+sqrt5) = 61.8034 for chi=0.01, gamma=1.
        exact = 100.0 * 2.0 / (1.0 + GOLDEN)
        assert q.critical_pump(sym_params) == pytest.approx(exact, abs=1e-12)
        assert q.critical_pump(sym_params) == pytest.approx(61.8034, abs=5e-5)

    def test_gamma_squared_scaling(self):
        p = q.SystemParams.symmetric(chi=0.01, gamma=2.0)
        assert q.critical_pump(p) == pytest.approx(
            4 * 100.0 * 2.0 / (1.0 + GOLDEN), rel=1e-14)
        assert q.critical_pump(p) == pytest.approx(247.2136, abs=5e-5)

    def test_monotonicity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            chi = rng.uniform(0.002, 0.05)
            gam = rng.uniform(0.2, 3.0)
            base = q.critical_pump(q.SystemParams.symmetric(chi=chi, gamma=gam))
            up_g = q.critical_pump(q.SystemParams.symmetric(chi=chi, gamma=gam * 1.5))
            up_c = q.critical_pump(q.SystemParams.symmetric(chi=chi * 1.5, gamma=gam))
            assert up_g > base
            assert up_c < base

    def test_rejects_asymmetric(self):
        with pytest.raises(AsymmetricParameters):
            q.critical_pump(q.SystemParams(chi1=0.01, chi2=0.02))
        with pytest.raises(AsymmetricParameters):
            q.critical_pump(q.SystemParams(gamma=(1, 1, 1, 1, 1, 2)))
        with pytest.raises(AsymmetricParameters):
            q.critical_pump(q.SystemParams(eps1=1.0, eps2=2.0))


class TestSystemParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            q.SystemParams(chi1=0.0)
        with pytest.raises(ValueError):
            q.SystemParams(gamma=(1.0,) * 5)
        with pytest.raises(ValueError):
            q.SystemParams(gamma=(1, 1, 1, 0, 1, 1))
        with pytest.raises(ValueError):
            q.SystemParams(eps3_injected=-0.1)

    def test_symmetric_helper(self):
        p = q.SystemParams.symmetric(chi=0.02, gamma=1.5, eps=3.0, eps3=0.1)
        assert p.is_symmetric
        assert p.chi1 == p.chi2 == 0.02
        assert p.gamma == (1.5,) * 6
        assert p.eps1 == p.eps2 == 3.0
        assert p.eps3_injected == 0.1

    def test_defaults(self):
        p = q.SystemParams()
        assert p.chi1 == 0.01
        assert p.gamma == (1.0,) * 6
        assert p.eps3_injected == 0.0


class TestConfigLoading:
    def test_json_roundtrip(self, tmp_path):
        cfg = {"chi1": 0.02, "chi2": 0.01, "gamma": 1.5, "gamma3": 2.0,
               "eps1": 10.0, "eps3": 0.5}
        path = tmp_path / "params.json"
        path.write_text(json.dumps(cfg))
        p = load_params(path)
        assert p.chi1 == 0.02 and p.chi2 == 0.01
        assert p.gamma == (1.5, 1.5, 2.0, 1.5, 1.5, 1.5)
        assert p.eps1 == 10.0 and p.eps3_injected == 0.5

    def test_toml(self, tmp_path):
        path = tmp_path / "params.toml"
        path.write_text("chi1 = 0.015\neps2 = 2.5\n")
        p = load_params(path)
        assert p.chi1 == 0.015
        assert p.eps2 == 2.5
        assert p.chi2 == 0.01  # documented default

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown parameter"):
            params_from_dict({"chii1": 0.02})

    def test_unknown_extension_rejected(self, tmp_path):
        path = tmp_path / "params.yaml"
        path.write_text("chi1: 0.1")
        with pytest.raises(ValueError):
            load_params(path)


class TestImmutability:
    def test_graph_arrays_readonly(self):
        g = q.build_graph_matrices()
        with pytest.raises(ValueError):
            g.g[0, 0] = 5
        with pytest.raises(ValueError):
            g.a_cluster[0, 0] = 5.0
