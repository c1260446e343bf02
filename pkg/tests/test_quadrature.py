"""Polar quadrature grids against analytic Gaussian integrals."""

import numpy as np
import pytest

from ebench.quadrature import QuadratureGrid


class TestGaussLaguerre:
    @pytest.mark.parametrize("lam", [0.25, 0.5, 1.0, 4.0])
    def test_gaussian_mass(self, lam):
        g = QuadratureGrid.gauss_laguerre(lam, 64, 64)
        assert abs(g.gaussian_mass() - 1.0) < 1e-8

    def test_gaussian_moments(self):
        # lam/pi int e^{-lam|a|^2} |a|^{2p} d^2a = p! / lam^p
        g = QuadratureGrid.gauss_laguerre(0.7, 64, 64)
        for p, want in ((1, 1 / 0.7), (2, 2 / 0.49), (3, 6 / 0.7 ** 3)):
            got = 0.7 * np.sum(g.weights * np.abs(g.nodes) ** (2 * p))
            assert abs(got - want) < 1e-8 * want

    def test_bare_weights_decaying_integrand(self):
        # int e^{-2|a|^2} d^2a/pi = 1/2, integrand carries its own Gaussian
        g = QuadratureGrid.gauss_laguerre(1.0, 64, 64)
        got = np.sum(g.bare_weights * np.exp(-2.0 * np.abs(g.nodes) ** 2))
        assert abs(got - 0.5) < 1e-10

    def test_angular_harmonics_vanish(self):
        g = QuadratureGrid.gauss_laguerre(1.0, 32, 32)
        for k in (1, 2, 5):
            got = np.sum(g.weights * g.nodes ** k)
            assert abs(got) < 1e-12

    def test_refinement_stability(self):
        g = QuadratureGrid.gauss_laguerre(1.0, 64, 64)
        g2 = g.refined(2)

        def f(nodes):
            return np.exp(-0.3 * np.abs(nodes) ** 2) * (1 + np.abs(nodes) ** 2)
        v1 = complex(np.sum(g.weights * f(g.nodes))).real
        v2 = complex(np.sum(g2.weights * f(g2.nodes))).real
        assert abs(v1 - v2) < 1e-6

    def test_alpha_max_cap(self):
        g = QuadratureGrid.gauss_laguerre(1.0, 64, 16, alpha_max=4.0)
        assert np.max(np.abs(g.nodes)) <= 4.0
        # mass lost beyond the cap ~ e^{-16}
        assert abs(g.gaussian_mass() - 1.0) < 1e-6

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            QuadratureGrid.gauss_laguerre(0.0, 64, 64)
        with pytest.raises(ValueError):
            QuadratureGrid.gauss_laguerre(1.0, 1, 64)
        with pytest.raises(ValueError):
            QuadratureGrid.gauss_laguerre(1.0, 64, 64, alpha_max=1e-6)


class TestFlatDisk:
    def test_disk_mass_and_moment(self):
        g = QuadratureGrid.flat_disk(3.0, 48, 32)
        # int_disk d^2a/pi = R^2; mean |a|^2 under uniform density = R^2/2
        assert abs(np.sum(g.weights) - 9.0) < 1e-10
        got = np.sum(g.weights * np.abs(g.nodes) ** 2) / 9.0
        assert abs(got - 4.5) < 1e-10

    def test_gaussian_mass_helper(self):
        g = QuadratureGrid.flat_disk(2.5, 32, 32)
        assert abs(g.gaussian_mass() - 1.0) < 1e-12

    def test_metadata(self):
        g = QuadratureGrid.flat_disk(2.0, 16, 16)
        assert g.metadata()["kind"] == "flat_disk"
        g2 = QuadratureGrid.gauss_laguerre(1.0, 16, 16)
        assert g2.metadata()["kind"] == "gauss_laguerre"
