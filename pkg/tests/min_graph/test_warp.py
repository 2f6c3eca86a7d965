"""Tests for warp functions and the doubly-warped profile."""

from unittest import TestCase

import numpy as np
from hypothesis import given, settings, strategies as st

from min_graph.errors import ArgumentError, WarpConstructionError, WarpDomainError
from min_graph.warp import (
    ConstantWarp,
    EuclideanWarp,
    HyperbolicWarp,
    KWEtaWarp,
    KWFWarp,
    KWProfile,
    PiecewiseWarp,
    PowerWarp,
    SphereWarp,
    derivative_consistency,
    warp_eval,
    warp_from_spec,
)


class TestClosedForms(TestCase):
    """Closed-form warps return (value, d1, d2)."""

    def test_euclidean_triple(self):
        v, d1, d2 = warp_eval(EuclideanWarp(), np.array([0.0, 2.0]))
        np.testing.assert_array_equal(v, [0.0, 2.0])
        np.testing.assert_array_equal(d1, [1.0, 1.0])
        np.testing.assert_array_equal(d2, [0.0, 0.0])

    def test_sphere_at_equator(self):
        v, d1, d2 = SphereWarp(1.0)(np.pi / 2)
        self.assertAlmostEqual(float(v), 1.0, places=14)
        self.assertAlmostEqual(float(d1), 0.0, places=14)
        self.assertAlmostEqual(float(d2), -1.0, places=14)

    def test_scalar_input_keeps_scalar_shape(self):
        v, _, _ = HyperbolicWarp(2.0)(1.0)
        self.assertEqual(np.shape(v), ())
        self.assertAlmostEqual(float(v), np.sinh(2.0) / 2.0, places=12)

    def test_sphere_outside_domain_raises(self):
        with self.assertRaises(WarpDomainError):
            SphereWarp(1.0)(np.array([1.0, 4.0]))

    def test_power_warp_excludes_zero(self):
        w = PowerWarp(1.0, 0.5)
        with self.assertRaises(WarpDomainError):
            w(0.0)
        self.assertTrue(bool(w.contains(1e-9)))

    def test_non_positive_parameters_rejected(self):
        for make in (lambda: SphereWarp(0.0), lambda: HyperbolicWarp(-1.0), lambda: ConstantWarp(0.0), lambda: PowerWarp(-1.0)):
            with self.assertRaises(ArgumentError):
                make()

    def test_reported_derivatives_match_differences(self):
        r = np.linspace(0.2, 3.0, 50)
        for w in (SphereWarp(1.0), HyperbolicWarp(1.0), PowerWarp(2.0, 1.5), KWFWarp(10.0, 5.0, -0.3)):
            e1, e2 = derivative_consistency(w, r)
            self.assertLess(e1, 1e-6, w.name)
            self.assertLess(e2, 1e-4, w.name)


class TestPiecewise(TestCase):
    """Hermite-bridged warps are C^2 across the bridge."""

    def test_bridge_matches_neighbours(self):
        w = PiecewiseWarp(SphereWarp(1.0), ConstantWarp(0.5), (1.0, 2.0))
        left = SphereWarp(1.0)(1.0)
        for got, want in zip(w(1.0), left, strict=True):
            self.assertAlmostEqual(float(got), float(want), places=10)
        v, d1, d2 = w(2.0)
        self.assertAlmostEqual(float(v), 0.5, places=10)
        self.assertAlmostEqual(float(d1), 0.0, places=10)
        self.assertAlmostEqual(float(d2), 0.0, places=10)

    def test_reversed_bridge_rejected(self):
        with self.assertRaises(WarpConstructionError):
            PiecewiseWarp(EuclideanWarp(), ConstantWarp(1.0), (2.0, 1.0))


class TestKWProfile(TestCase):
    """zeta_1, zeta_2 and the eta built from them."""

    def setUp(self):
        self.profile = KWProfile(0.4)

    def test_zeta2_is_continuous_at_the_joins(self):
        for t in (1.0, 2.0):
            below, above = self.profile.zeta2(np.array([t - 1e-9, t + 1e-9]))
            self.assertAlmostEqual(float(below), float(above), places=7)

    def test_zeta2_integral_differentiates_to_zeta2(self):
        h = 1e-5
        for r in (0.5, 1.5, 3.0, 40.0):
            fd = (self.profile.zeta2_integral(r + h) - self.profile.zeta2_integral(r - h)) / (2 * h)
            self.assertAlmostEqual(float(fd), float(self.profile.zeta2(r)), places=6)

    def test_eta_closes_at_the_pole(self):
        v, d1, _ = KWEtaWarp(0.4)(0.0)
        self.assertEqual(float(v), 0.0)
        self.assertAlmostEqual(float(d1), 1.0, places=12)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=0.0, max_value=1e4, allow_nan=False))
    def test_eta_prime_stays_in_half_open_range(self, r):
        _, d1, d2 = KWEtaWarp(0.4)(r)
        self.assertGreater(float(d1), 0.5)
        self.assertLessEqual(float(d1), 1.0 + 1e-12)
        self.assertLessEqual(float(d2), 0.0)

    def test_alpha_outside_unit_interval_rejected(self):
        with self.assertRaises(ArgumentError):
            KWProfile(1.0)


class TestWarpFromSpec(TestCase):
    """JSON specs build warps."""

    def test_named_warp(self):
        w = warp_from_spec({"name": "sphere", "params": {"k": 2.0}})
        self.assertIsInstance(w, SphereWarp)
        self.assertEqual(w.k, 2.0)

    def test_kw_f_derives_p_from_m_and_beta(self):
        w = warp_from_spec({"name": "kw-f", "params": {"b": 1.0, "c": 2.0, "m": 4, "beta": 0.4}})
        self.assertAlmostEqual(w.p, -0.3)

    def test_piecewise_needs_all_parts(self):
        with self.assertRaises(WarpConstructionError):
            warp_from_spec({"name": "custom-piecewise", "left": {"name": "euclidean"}})

    def test_unknown_name(self):
        with self.assertRaises(ArgumentError):
            warp_from_spec({"name": "torus"})
