import math

import numpy as np
from django.test import SimpleTestCase

from schwartz_dynamics.exceptions import InvalidGeometry
from schwartz_dynamics.schwartz import (CompactSupport, RationalDecay, SchwartzFn, bump,
                                        fourier_transform, gaussian, hermite_function,
                                        make_builtin, parse_builtin, plateau)


class TestBuiltins(SimpleTestCase):
    def test_gaussian(self):
        f = gaussian()
        self.assertEqual(f.evaluate(0.0), 1.0)
        self.assertAlmostEqual(f.evaluate(1.0), math.exp(-math.pi))
        self.assertEqual(f.describe(), 'gaussian')

    def test_gaussian_jet(self):
        jet = gaussian().jet(0.5, 2)
        value = math.exp(-math.pi / 4)
        self.assertAlmostEqual(jet.derivs[0], value)
        self.assertAlmostEqual(jet.derivs[1], -math.pi * value)
        self.assertAlmostEqual(jet.derivs[2], (4 * math.pi ** 2 / 4 - 2 * math.pi) * value)

    def test_hermite(self):
        f = hermite_function(2)
        # H_2(x) = 4x^2 - 2
        self.assertEqual(f.evaluate(0.0), -2.0)
        self.assertAlmostEqual(f.evaluate(1.0), 2 * math.exp(-math.pi))
        self.assertEqual(f.params, {'k': 2})
        with self.assertRaises(InvalidGeometry):
            hermite_function(-1)

    def test_bump(self):
        f = bump(-1.0, 1.0)
        self.assertEqual(f.evaluate(0.0), 1.0)
        np.testing.assert_array_equal(f.evaluate(np.array([-1.0, 0.9999, 1.0, 2.0])), [0.0, 0.0, 0.0, 0.0])
        self.assertAlmostEqual(f.evaluate(0.5), math.exp(1 - 1 / 0.75))
        self.assertEqual(f.decay, CompactSupport(-1.0, 1.0))

    def test_shifted_bump(self):
        f = bump(0.25, 0.5)
        self.assertAlmostEqual(f.evaluate(0.375), 1.0)
        self.assertEqual(f.evaluate(0.2), 0.0)

    def test_plateau(self):
        f = plateau(1.0, 2.0)
        self.assertEqual(f.evaluate(0.0), 1.0)
        self.assertEqual(f.evaluate(1.0), 1.0)
        self.assertAlmostEqual(f.evaluate(1.5), 0.5)
        self.assertAlmostEqual(f.evaluate(-1.5), 0.5)
        self.assertEqual(f.evaluate(2.5), 0.0)
        xs = np.linspace(-3, 3, 601)
        values = f.evaluate(xs)
        self.assertTrue(np.all((values >= 0) & (values <= 1)))
        np.testing.assert_allclose(values, values[::-1], atol=1e-12)

    def test_invalid_parameters(self):
        with self.assertRaises(InvalidGeometry):
            bump(1.0, 0.0)
        with self.assertRaises(InvalidGeometry):
            plateau(2.0, 1.0)


class TestParseBuiltin(SimpleTestCase):
    def test_forms(self):
        self.assertEqual(parse_builtin('gaussian').name, 'gaussian')
        self.assertEqual(parse_builtin('hermite:3').params, {'k': 3})
        self.assertEqual(parse_builtin('bump:-0.5:0.5').params, {'a': -0.5, 'b': 0.5})
        self.assertEqual(parse_builtin('plateau:1:2').params, {'inner': 1.0, 'outer': 2.0})

    def test_errors(self):
        for text in ('sech', 'bump:1', 'hermite:two', 'gaussian:1'):
            with self.assertRaises(InvalidGeometry):
                parse_builtin(text)
        with self.assertRaises(ValueError):
            make_builtin('bump', '1', '0')


class TestTailBounds(SimpleTestCase):
    def test_gaussian_majorant_holds(self):
        f = gaussian()
        xs = np.linspace(3.0, 12.0, 2001)
        jet = f.jet(xs, 2)
        actual = max(float(np.max((1 + xs ** 2) ** 2 * np.abs(d))) for d in jet.derivs)
        bound = f.tail_bound(2, 3.0)
        self.assertLessEqual(actual, bound)
        self.assertLess(f.tail_bound(2, 6.0), bound)

    def test_compact_support(self):
        f = bump(-1.0, 2.0)
        self.assertEqual(f.tail_bound(5, 2.0), 0.0)
        self.assertEqual(f.tail_bound(5, 1.5), math.inf)

    def test_rational_decay(self):
        decay = RationalDecay(power=6.0)
        self.assertEqual(decay.tail_bound(2, 2.0), 4 * 2.0 ** -2)
        self.assertEqual(decay.tail_bound(4, 2.0), math.inf)

    def test_scaled(self):
        f = gaussian().scaled(2.0)
        self.assertEqual(f.evaluate(0.0), 2.0)
        self.assertEqual(f.tail_bound(1, 3.0), 2 * gaussian().tail_bound(1, 3.0))
        self.assertEqual(f.describe(), '2.0*gaussian')


class TestFourierTransform(SimpleTestCase):
    def test_gaussian_is_self_dual(self):
        omegas = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(fourier_transform(gaussian(), omegas), np.exp(-math.pi * omegas ** 2))

    def test_quadrature_agrees_with_closed_form(self):
        g = gaussian()
        copy = SchwartzFn('gaussian copy', g.pieces, g.decay)
        for omega in (0.0, 0.3, 1.1):
            self.assertAlmostEqual(fourier_transform(copy, omega), complex(math.exp(-math.pi * omega ** 2)), places=10)

    def test_real_even_function_has_real_transform(self):
        value = fourier_transform(bump(-1.0, 1.0), 0.7)
        self.assertAlmostEqual(value.imag, 0.0, places=12)
