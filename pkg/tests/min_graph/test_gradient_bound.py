"""Tests for the explicit gradient bound and its parameters."""

import math
from unittest import TestCase
from unittest.mock import patch

import numpy as np
from hypothesis import given, strategies as st
from pydantic import ValidationError

from min_graph.counterexample import KWSpec, build_kw_manifold, certify
from min_graph.errors import ArgumentError, FeasibilityError, HypothesisError
from min_graph.gradient_bound import (
    BoundInputs,
    KorevaarParams,
    LogBound,
    bound_exponents,
    canonical_params,
    corollary_bound,
    decay_hypothesis_margin,
    entire_bound,
    entire_bound_limit,
    helper_constant,
    korevaar_bound,
    log_expm1,
    optimize_params,
    validate_params,
    verify_solution_bound,
)
from min_graph.model_manifold import ModelManifold
from min_graph.mse import TGraph, radial_flux_solution
from min_graph.warp import EuclideanWarp


class TestInputs(TestCase):
    """BoundInputs and KorevaarParams validation."""

    def test_inner_radius_below_outer(self):
        with self.assertRaises(ValidationError):
            BoundInputs(m=3, R=1.0, R1=2.0, gamma_star=1.0)

    def test_kbar0_floor(self):
        self.assertEqual(BoundInputs(m=3, kbar=0.2, R=2.0, R1=1.0, gamma_star=1.0).kbar0, 1.0)

    def test_tau_in_unit_interval(self):
        with self.assertRaises(ValidationError):
            KorevaarParams(eps=1.0, tau=1.0, q=1.0, a0=1.0, L=1.0)


class TestCanonicalParams(TestCase):
    """The closed-form parameter choice."""

    def test_worked_example(self):
        p = canonical_params(0.5, 1.0, 3, 1.0, 10.0)
        self.assertAlmostEqual(p.q, 0.176777, places=6)
        self.assertAlmostEqual(p.L, 204.8, places=9)
        self.assertEqual(p.tau, 0.5)

    @given(
        st.sampled_from([0.5, 0.6, 0.75, 0.9, 0.99]),
        st.floats(min_value=0.01, max_value=100.0),
    )
    def test_identities(self, delta, gamma_star):
        inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=gamma_star)
        p = canonical_params(delta, gamma_star, 3, inp.kbar0, inp.R)
        self.assertAlmostEqual(p.a3(inp) / p.a2(inp), 2.0, places=9)
        target = 32 * gamma_star**2 / (1 - delta) ** 2
        self.assertAlmostEqual(p.a0**2 * gamma_star**2 / target, 1.0, places=9)

    def test_valid_when_inner_ball_is_small(self):
        inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        report = validate_params(inp, canonical_params(0.5, 1.0, 3, 1.0, 10.0))
        self.assertTrue(report.passed)
        self.assertEqual(report.failed, [])

    def test_full_canonical_grid_is_valid(self):
        for delta in (0.5, 0.7, 0.9):
            for gamma_star in (0.1, 1.0, 10.0):
                inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=gamma_star)
                report = validate_params(inp, canonical_params(delta, gamma_star, 3, inp.kbar0, inp.R))
                self.assertTrue(report.passed, (delta, gamma_star, report.failed))

    def test_delta_range(self):
        with self.assertRaises(ArgumentError):
            canonical_params(0.4, 1.0, 3, 1.0, 10.0)
        with self.assertRaises(ArgumentError):
            canonical_params(1.0, 1.0, 3, 1.0, 10.0)

    def test_violated_constraint_is_reported(self):
        inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        p = KorevaarParams(eps=0.5, tau=0.5, q=10.0, a0=1.0, L=1.0)
        self.assertIn("par_1b_upper", validate_params(inp, p).failed)


class TestBound(TestCase):
    """Log-domain evaluation of the bound."""

    def setUp(self):
        self.inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        self.p = canonical_params(0.5, 1.0, 3, 1.0, 10.0)

    def test_bound_is_at_least_one(self):
        self.assertGreater(korevaar_bound(self.inp, self.p, 0.0, 0.0).log_value, 0.0)

    def test_bound_grows_with_height(self):
        low = korevaar_bound(self.inp, self.p, 0.5, 0.1)
        high = korevaar_bound(self.inp, self.p, 0.5, 0.9)
        self.assertTrue(low < high)

    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_ratio_factor_is_at_least_one(self, r_frac, gamma):
        num, den = bound_exponents(self.inp, self.p, r_frac * self.inp.R1, gamma)
        self.assertGreater(den, 0.0)
        self.assertGreaterEqual(num, den)
        self.assertGreaterEqual(log_expm1(num) - log_expm1(den), 0.0)

    @given(
        st.floats(min_value=0.1, max_value=10.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_invariant_under_rescaling(self, lam, r_frac, gamma):
        inp = BoundInputs(m=3, kappa=1e-3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        scaled = BoundInputs(m=3, kappa=1e-3 / lam, kbar=1.0, R=10.0 * lam, R1=lam, gamma_star=1.0)
        p_scaled = self.p.model_copy(update={"L": self.p.L / lam})
        base = korevaar_bound(inp, self.p, r_frac, gamma).log_value
        other = korevaar_bound(scaled, p_scaled, r_frac * lam, gamma).log_value
        self.assertAlmostEqual(other, base, delta=1e-9 * max(1.0, abs(base)))

    def test_radius_range(self):
        with self.assertRaises(ArgumentError):
            korevaar_bound(self.inp, self.p, 2.0, 0.0)

    def test_log_expm1(self):
        self.assertAlmostEqual(log_expm1(50.0), 50.0, places=12)
        self.assertAlmostEqual(log_expm1(1.0), math.log(math.e - 1), places=14)
        with self.assertRaises(FeasibilityError):
            log_expm1(0.0)

    def test_overflow_reported_as_inf(self):
        self.assertEqual(LogBound(1e6).value, math.inf)


class TestCorollary(TestCase):
    """The delta-parameterized estimate and the entire-solution limit."""

    def test_pieces(self):
        c = corollary_bound(0.5, 1.0, 3, 1.0)
        self.assertEqual(c.helper, 8.0)
        self.assertAlmostEqual(c.prefactor, math.sqrt(129.0))
        self.assertAlmostEqual(c.log_value, math.log(c.prefactor) + math.log(8.0) + c.exponent)

    def test_dominates_the_canonical_bound(self):
        cor = corollary_bound(0.5, 1.0, 3, 1.0)
        for R1 in (1.0, 5.0):
            inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=R1, gamma_star=1.0)
            p = canonical_params(0.5, 1.0, 3, inp.kbar0, inp.R)
            for r in np.linspace(0.0, R1, 11):
                for gamma in np.linspace(0.0, 1.0, 11):
                    bound = korevaar_bound(inp, p, float(r), float(gamma))
                    self.assertLessEqual(bound.log_value, cor.log_value, (R1, r, gamma))

    def test_helper_range(self):
        with self.assertRaises(ArgumentError):
            helper_constant(0.5)

    def test_limit_approaches_entire_bound(self):
        limit = entire_bound_limit(0.1, 3, 1.0, np.geomspace(1e2, 1e12, 11))
        self.assertTrue(np.all(np.diff(limit) <= 0))
        self.assertLess(abs(limit[-1] - entire_bound(0.1, 3, 1.0).log_value), 1e-6)


class TestOptimize(TestCase):
    """Restarted Nelder-Mead search over feasible parameters."""

    def test_not_worse_than_canonical(self):
        inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        res = optimize_params(inp, 0.5, 0.5, seed=0, budget=400, restarts=3)
        self.assertIsNotNone(res.canonical_bound)
        self.assertTrue(res.bound <= res.canonical_bound)
        self.assertTrue(validate_params(inp, res.params).passed)

    def test_deterministic_for_a_seed(self):
        inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        a = optimize_params(inp, 0.5, 0.5, seed=3, budget=200, restarts=3)
        b = optimize_params(inp, 0.5, 0.5, seed=3, budget=200, restarts=3)
        self.assertEqual(a.bound.log_value, b.bound.log_value)


class TestVerify(TestCase):
    """Sampled verification on shipped graphs."""

    def test_catenoid(self):
        plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
        graph = radial_flux_solution(plane, 1.0, 1.5, 9.5, 513)
        res = verify_solution_bound(graph, BoundInputs(m=2, R=2.0, R1=1.0, gamma_star=1.0), n_samples=11, n_theta=16)
        self.assertTrue(res["passed"])
        self.assertGreater(res["gamma_star"], 0.0)
        self.assertEqual(res["ell"], 1)

    def test_t_graph_needs_certificate(self):
        kw = build_kw_manifold(KWSpec())
        inp = BoundInputs(m=4, kbar=1.0, R=10.0, R1=5.0, gamma_star=1.0)
        with self.assertRaises(HypothesisError):
            verify_solution_bound(TGraph(kw, 1.0), inp)

    def test_t_graph_bound_at_the_lower_distance(self):
        spec = KWSpec()
        cert = certify(spec, r_max=50.0, n=256)
        kw = build_kw_manifold(spec)
        inp = BoundInputs(m=4, kbar=cert.kbar_decay, R=10.0, R1=5.0, gamma_star=1.0)
        calls = []

        def recording(inp_, params, r, gamma):
            calls.append((r, gamma))
            return korevaar_bound(inp_, params, r, gamma)

        with patch("min_graph.gradient_bound.korevaar_bound", side_effect=recording):
            res = verify_solution_bound(TGraph(kw, 1.0), inp, certificate=cert, n_samples=11)
        self.assertTrue(res["passed"])
        self.assertGreater(res["min_log_margin"], 0.0)

        c_low = float(np.min(kw.f.value(np.linspace(0.0, 50.0, 4097))))
        f0 = float(kw.f.value(0.0))
        samples = [(t, r) for t in np.linspace(-5.0 / f0, 5.0 / f0, 11) for r in np.linspace(0.0, 5.0 - f0 * abs(t), 11)]
        self.assertEqual(len(calls), len(samples))
        for (d, gamma), (t, r) in zip(calls, samples, strict=True):
            self.assertLessEqual(d, max(r, c_low * abs(t)) + 1e-12)
            self.assertLessEqual(gamma, max(0.0, (t + 10.0 / f0) / 10.0) + 1e-12)

    def test_t_graph_rejects_failed_certificate(self):
        spec = KWSpec()
        cert = certify(spec, r_max=50.0, n=256)
        claims = [c.model_copy(update={"status": "fail"}) if c.name == "ricci_positive" else c for c in cert.claims]
        cert = cert.model_copy(update={"claims": claims})
        inp = BoundInputs(m=4, kbar=cert.kbar_decay + 1.0, R=10.0, R1=5.0, gamma_star=1.0)
        with self.assertRaises(HypothesisError):
            verify_solution_bound(TGraph(build_kw_manifold(spec), 1.0), inp, certificate=cert)

    def test_decay_margin_on_flat_space(self):
        plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
        graph = radial_flux_solution(plane, 1.0, 1.5, 9.5, 65)
        self.assertEqual(decay_hypothesis_margin(graph, 0.0), 0.0)
