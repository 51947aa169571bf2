import math

import numpy as np
from django.test import SimpleTestCase

from schwartz_dynamics.dynamics import (cesaro_mean, orbit_seminorm_profile, phi_star,
                                        seminorm)
from schwartz_dynamics.exceptions import PreconditionError
from schwartz_dynamics.expressions import parse_symbol
from schwartz_dynamics.grids import GridSpec
from schwartz_dynamics.schwartz import bump, gaussian, hermite_function


class TestSeminorm(SimpleTestCase):
    def test_sup_norm(self):
        estimate = seminorm(gaussian(), 0)
        self.assertAlmostEqual(estimate.value, 1.0)
        self.assertEqual(estimate.argmax_j, 0)
        self.assertAlmostEqual(estimate.argmax_x, 0.0, places=6)

    def test_agrees_with_a_dense_scan(self):
        f = gaussian()
        xs = np.linspace(-5, 5, 200001)
        jet = f.jet(xs, 1)
        expected = float(np.max((1 + xs ** 2) * np.maximum(np.abs(jet.derivs[0]), np.abs(jet.derivs[1]))))
        self.assertAlmostEqual(seminorm(f, 1).value / expected, 1.0, places=6)

    def test_compactly_supported(self):
        estimate = seminorm(bump(-1.0, 1.0), 0)
        self.assertAlmostEqual(estimate.value, 1.0)
        self.assertEqual(estimate.tail_bound, 0.0)

    def test_index_range(self):
        with self.assertRaises(ValueError):
            seminorm(gaussian(), 9)
        with self.assertRaises(ValueError):
            seminorm(gaussian(), -1)


class TestOrbitProfile(SimpleTestCase):
    def test_sqrt_shift_stays_bounded(self):
        profile = orbit_seminorm_profile(parse_symbol('sqrt(x^2+1)'), gaussian(), 3, 100)
        self.assertEqual(len(profile.estimates), 100)
        self.assertFalse(profile.growth_flag)
        reference = profile.values[9]
        self.assertTrue(all(value <= 1.05 * reference for value in profile.values[9:]))

    def test_translation_grows_within_the_translation_bound(self):
        f = gaussian()
        profile = orbit_seminorm_profile(parse_symbol('x+1'), f, 3, 20)
        self.assertTrue(profile.growth_flag)
        base = seminorm(f, 3).value
        for k, value in enumerate(profile.values, start=1):
            self.assertLessEqual(value, (1 + 4 * k ** 2) ** 3 * base)
        # the mass of f∘φ_k sits near x = -k
        self.assertAlmostEqual(profile.estimates[-1].argmax_x, -20.0, delta=2.0)

    def test_grid_is_extended_when_the_orbit_reaches_the_edge(self):
        profile = orbit_seminorm_profile(parse_symbol('x+1'), gaussian(), 1, 40)
        self.assertEqual(profile.extensions, 1)
        self.assertEqual(profile.grid.half_width, 60.0)

    def test_horizon_range(self):
        with self.assertRaises(ValueError):
            orbit_seminorm_profile(parse_symbol('x+1'), gaussian(), 1, 501)
        with self.assertRaises(ValueError):
            orbit_seminorm_profile(parse_symbol('x+1'), gaussian(), 1, 0)


class TestCesaroMean(SimpleTestCase):
    def test_sqrt_shift_means_go_to_zero(self):
        result = cesaro_mean(parse_symbol('sqrt(x^2+1)'), gaussian(), 200)
        self.assertLessEqual(result.sup_norm, 0.05)
        self.assertEqual(len(result.sup_norms), 200)
        self.assertEqual(len(result.sup_increments), 199)
        self.assertEqual(result.values.shape, result.xs.shape)

    def test_reflection_cancels_odd_functions(self):
        result = cesaro_mean(parse_symbol('-x'), hermite_function(1), 40)
        self.assertLessEqual(result.sup_norm, 1e-12)
        # odd-length means keep a -f/N term
        self.assertGreater(result.sup_norms[38], 1e-3)

    def test_translation_means_are_not_bounded(self):
        grid = GridSpec(half_width=240.0, points=16001)
        result = cesaro_mean(parse_symbol('x+1'), gaussian(), 200, grid, seminorm_index=2)
        self.assertGreaterEqual(result.seminorms[199], 2 * result.seminorms[19])
        self.assertEqual(result.extensions, 0)

    def test_values_are_the_mean(self):
        result = cesaro_mean(parse_symbol('x+1'), gaussian(), 2, GridSpec(half_width=10.0, points=201))
        expected = (np.exp(-math.pi * (result.xs + 1) ** 2) + np.exp(-math.pi * (result.xs + 2) ** 2)) / 2
        np.testing.assert_allclose(result.values, expected, atol=1e-13)


class TestPhiStar(SimpleTestCase):
    def test_converges_to_an_attracting_fixed_point(self):
        limit = phi_star(parse_symbol('x/2'), 3.0)
        self.assertEqual(limit.reason, 'stabilized')
        self.assertAlmostEqual(limit.value, 0.0, places=10)

    def test_cubic(self):
        phi = parse_symbol('x^3')
        self.assertAlmostEqual(phi_star(phi, 0.5).value, 0.0, places=10)
        self.assertEqual(phi_star(phi, 2.0).value, math.inf)
        self.assertEqual(phi_star(phi, -2.0).value, -math.inf)
        self.assertEqual(phi_star(phi, 1.0).value, 1.0)

    def test_translation_escapes(self):
        limit = phi_star(parse_symbol('x+1'), -10.0)
        self.assertEqual(limit.value, math.inf)
        self.assertEqual(limit.reason, 'escaped beyond every fixed point')

    def test_requires_an_increasing_symbol(self):
        with self.assertRaises(PreconditionError):
            phi_star(parse_symbol('x^2'), 1.0)
