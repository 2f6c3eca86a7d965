"""Tests for radial minimal graphs, t-graphs and the Caccioppoli check."""

from unittest import TestCase

import numpy as np

from min_graph.counterexample import KWSpec, build_kw_manifold
from min_graph.errors import ArgumentError, FeasibilityError, GridShapeError, ManifoldError, PreconditionError
from min_graph.model_manifold import ModelManifold
from min_graph.mse import (
    AnnulusCutoff,
    RadialFunction,
    RadialGraph,
    TGraph,
    asymptotic_averages,
    caccioppoli_check,
    curvature_profile,
    flux_drift,
    graph_laplacian,
    jacobi_residual,
    mse_residual,
    radial_flux_solution,
    t_graph_residual,
    w_operator,
)
from min_graph.warp import EuclideanWarp

PLANE = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())


def catenoid(n: int) -> RadialGraph:
    return radial_flux_solution(PLANE, 1.0, 1.5, 9.5, n)


class TestFluxSolution(TestCase):
    """The catenoid from its conserved flux."""

    def test_matches_arccosh(self):
        g = catenoid(2049)
        exact = np.arccosh(g.r) - np.arccosh(1.5)
        self.assertLess(float(np.max(np.abs(g.u - exact))), 1e-9)

    def test_flux_is_conserved(self):
        self.assertLess(flux_drift(catenoid(513)), 1e-12)

    def test_flux_too_large(self):
        with self.assertRaises(FeasibilityError):
            radial_flux_solution(PLANE, 2.0, 1.5, 3.0, 65)

    def test_bad_interval(self):
        with self.assertRaises(ArgumentError):
            radial_flux_solution(PLANE, 0.5, 2.0, 1.0, 65)

    def test_residual_converges_at_second_order(self):
        coarse = mse_residual(catenoid(257)).max
        fine = mse_residual(catenoid(513)).max
        self.assertGreater(coarse / fine, 3.0)
        self.assertLess(coarse / fine, 5.0)


class TestOperators(TestCase):
    """Graph Laplacian, the W operator and the Jacobi equation."""

    def setUp(self):
        self.graph = catenoid(4097)

    def test_constants_are_harmonic(self):
        ones = np.ones_like(self.graph.r)
        self.assertEqual(graph_laplacian(self.graph, ones).max, 0.0)
        self.assertEqual(w_operator(self.graph, ones).max, 0.0)

    def test_phi_shape_checked(self):
        with self.assertRaises(GridShapeError):
            graph_laplacian(self.graph, np.ones(3))

    def test_jacobi_residual_small_on_catenoid(self):
        self.assertLess(jacobi_residual(self.graph).max, 1e-3)

    def test_jacobi_warns_on_non_minimal_graph(self):
        r = np.linspace(1.0, 3.0, 201)
        paraboloid = RadialGraph.from_function(PLANE, r, r**2, 2 * r)
        self.assertIsNotNone(jacobi_residual(paraboloid).warning)

    def test_second_fundamental_form_dominates_hessian(self):
        prof = curvature_profile(self.graph)
        self.assertGreaterEqual(prof.hessian_inequality_margin(self.graph.W), -1e-12)

    def test_asymptotic_averages_need_points(self):
        with self.assertRaises(ArgumentError):
            asymptotic_averages(self.graph, np.array([1.5]))


class TestRadialGraph(TestCase):
    """Grid and manifold checks."""

    def test_non_uniform_grid_rejected(self):
        r = np.array([1.0, 1.1, 1.5, 2.0])
        with self.assertRaises(GridShapeError):
            RadialGraph.from_function(PLANE, r, r)

    def test_doubly_warped_manifold_rejected(self):
        r = np.linspace(1.0, 2.0, 5)
        with self.assertRaises(ManifoldError):
            RadialGraph(build_kw_manifold(KWSpec()), r, r, np.ones_like(r))


class TestTGraph(TestCase):
    """Affine graphs in t on the doubly-warped manifold."""

    def setUp(self):
        self.man = build_kw_manifold(KWSpec(b=100.0, c=100.0))

    def test_affine_graph_is_minimal(self):
        g = TGraph(self.man, 2.0)
        np.testing.assert_array_equal(t_graph_residual(g, 0.0, np.linspace(0.0, 50.0, 11)), 0.0)

    def test_slope_bounded_by_a_over_c(self):
        g = TGraph(self.man, 2.0)
        self.assertLessEqual(g.sup_slope(np.linspace(0.0, 200.0, 401)), 2.0 / 100.0)

    def test_rotsym_rejected(self):
        with self.assertRaises(ManifoldError):
            TGraph(PLANE, 1.0)


class TestCaccioppoli(TestCase):
    """Both sides of the energy inequality for a harmonic function."""

    def setUp(self):
        self.r = np.linspace(1.0, 8.0, 4001)

    def test_log_r_satisfies_the_inequality(self):
        u = RadialFunction(PLANE, self.r, np.log(self.r), 1.0 / self.r)
        res = caccioppoli_check(u, AnnulusCutoff(4.0), 1.0)
        self.assertTrue(res.holds)
        self.assertGreater(res.margin, 0.0)
        self.assertEqual(res.shift, 0.0)

    def test_checked_on_the_shifted_function(self):
        base = caccioppoli_check(RadialFunction(PLANE, self.r, np.log(self.r), 1.0 / self.r), AnnulusCutoff(4.0), 1.0)
        lifted = caccioppoli_check(RadialFunction(PLANE, self.r, np.log(self.r) + 5.0, 1.0 / self.r), AnnulusCutoff(4.0), 1.0)
        self.assertEqual(lifted.shift, 5.0)
        self.assertAlmostEqual(lifted.lhs, base.lhs, places=12)
        self.assertAlmostEqual(lifted.rhs, base.rhs, places=9)

    def test_cutoff_must_vanish(self):
        u = RadialFunction(PLANE, self.r, np.log(self.r), 1.0 / self.r)
        with self.assertRaises(ArgumentError):
            caccioppoli_check(u, AnnulusCutoff(5.0), 1.0)

    def test_non_solution_rejected(self):
        u = RadialFunction(PLANE, self.r, np.exp(self.r), np.exp(self.r))
        with self.assertRaises(PreconditionError):
            caccioppoli_check(u, AnnulusCutoff(4.0), 1.0)

    def test_cutoff_radius_positive(self):
        with self.assertRaises(ArgumentError):
            AnnulusCutoff(0.0)
