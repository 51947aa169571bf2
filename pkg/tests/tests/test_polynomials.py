import random
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from schwartz_dynamics.expressions import parse_symbol
from schwartz_dynamics.polynomials import (Poly, fixed_points, has_odd_multiplicity_root,
                                           isolate_real_roots, poly_from_expr, real_root_count,
                                           sturm_root_count)


class TestPolyArithmetic(SimpleTestCase):
    def test_coefficients_are_exact(self):
        p = Poly([Fraction(1, 3), 0, 1])
        self.assertEqual(p(Fraction(1, 2)), Fraction(7, 12))
        self.assertEqual(p.degree, 2)
        self.assertEqual(Poly([1, 0, 0]).degree, 0)
        self.assertEqual(Poly([]).degree, -1)

    def test_division(self):
        quotient, remainder = divmod(Poly([-1, 0, 1]), Poly([1, 1]))
        self.assertEqual(quotient, Poly([-1, 1]))
        self.assertTrue(remainder.is_zero())

    def test_compose(self):
        self.assertEqual(Poly([1, 0, 1]).compose(Poly([1, 1])), Poly([2, 2, 1]))


class TestFromExpression(SimpleTestCase):
    def test_expands(self):
        self.assertEqual(poly_from_expr(parse_symbol('(x+1)^2-x/2')), Poly([1, Fraction(3, 2), 1]))

    def test_decimal_constants_convert_exactly(self):
        self.assertEqual(poly_from_expr(parse_symbol('0.5*x')), Poly([0, Fraction(1, 2)]))

    def test_not_a_polynomial(self):
        self.assertIsNone(poly_from_expr(parse_symbol('sqrt(x^2+1)')))
        self.assertIsNone(poly_from_expr(parse_symbol('1/x')))
        self.assertIsNone(poly_from_expr(parse_symbol('x^(-1)')))


class TestRealRoots(SimpleTestCase):
    def test_sturm_count(self):
        p = Poly([-2, 0, 1])  # x^2 - 2
        self.assertEqual(sturm_root_count(p, -2, 2), 2)
        self.assertEqual(sturm_root_count(p, 0, 2), 1)
        self.assertEqual(sturm_root_count(Poly([1, 0, 1]), -10, 10), 0)

    def test_isolation(self):
        p = Poly([0, -1, 0, 1])  # x^3 - x
        intervals = isolate_real_roots(p)
        self.assertEqual(len(intervals), 3)
        for interval, root in zip(intervals, (-1, 0, 1)):
            self.assertTrue(interval.contains(root))
            self.assertAlmostEqual(interval.approximate(p), root, places=12)

    def test_repeated_roots(self):
        p = Poly([1, -2, 1]) * Poly([2, 1])  # (x - 1)^2 (x + 2)
        intervals = isolate_real_roots(p)
        self.assertEqual([interval.multiplicity_hint for interval in intervals], [1, 2])
        self.assertEqual(real_root_count(p), 2)
        self.assertTrue(has_odd_multiplicity_root(p))
        self.assertFalse(has_odd_multiplicity_root(Poly([1, -2, 1])))

    def test_fixed_points(self):
        self.assertEqual(fixed_points(Poly([1, 0, 1])), [])
        intervals = fixed_points(Poly([0, 0, 1]))
        self.assertEqual(len(intervals), 2)
        # x^2 + 1/4 touches the diagonal at 1/2
        tangential = fixed_points(Poly([Fraction(1, 4), 0, 1]))
        self.assertEqual(len(tangential), 1)
        self.assertEqual(tangential[0].multiplicity_hint, 2)
        self.assertAlmostEqual(tangential[0].approximate(Poly([Fraction(1, 4), -1, 1])), 0.5, places=8)

    def test_identity_has_no_isolated_fixed_points(self):
        with self.assertRaises(ValueError):
            fixed_points(Poly.identity())


QUARTER_GRID = [Fraction(k, 4) for k in range(-40, 41)]


def random_displacement(rng):
    """
    c·Π(x - r)^m, times x^2 + s (s > 0) for some draws: a polynomial of degree <= 8 with
    known distinct rational roots r, a quarter apart at least, and multiplicities m.
    """
    offset = Fraction(rng.randint(1, 16), 4) if rng.random() < 0.3 else None
    quadratic = Poly([offset, 0, 1]) if offset else None
    budget = 8 - (2 if quadratic else 0)
    roots = {}
    for r in rng.sample(QUARTER_GRID, rng.randint(0 if quadratic else 1, 4)):
        m = rng.randint(1, 3)
        if m > budget:
            break
        roots[r] = m
        budget -= m
    if not roots and quadratic is None:
        roots[rng.choice(QUARTER_GRID)] = 1
    scale = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5))
    factors = [Poly([scale])] + [Poly([-r, 1]) ** m for r, m in roots.items()]
    if quadratic is not None:
        factors.append(quadratic)
    displacement = Poly([1])
    for factor in factors:
        displacement = displacement * factor
    return displacement, scale, dict(sorted(roots.items())), offset


def sign_changes(scale, roots, offset, xs):
    """Sign changes of the displacement along xs, evaluated in factored form"""
    values = np.full_like(xs, float(scale))
    for root, multiplicity in roots.items():
        values = values * (xs - float(root)) ** multiplicity
    if offset is not None:
        values = values * (xs ** 2 + float(offset))
    return int(np.count_nonzero(np.sign(values[1:]) != np.sign(values[:-1])))


class TestFixedPointsAgainstSignScan(SimpleTestCase):
    def test_random_polynomials(self):
        rng = random.Random(1234)
        # no node hits a quarter-integer root
        step = 21 / 10 ** 6
        xs = -10.5 + (np.arange(10 ** 6) + 0.5) * step
        for case in range(200):
            displacement, scale, roots, offset = random_displacement(rng)
            phi = Poly.identity() + displacement
            with self.subTest(case=case, phi=phi):
                intervals = fixed_points(phi)
                self.assertEqual(len(intervals), len(roots))
                for interval, (root, multiplicity) in zip(intervals, roots.items()):
                    self.assertTrue(interval.contains(root))
                    self.assertEqual(interval.multiplicity_hint, multiplicity)
                crossings = sign_changes(scale, roots, offset, xs)
                odd = [interval for interval in intervals if interval.multiplicity_hint % 2]
                tangential = [interval for interval in intervals if interval.multiplicity_hint % 2 == 0]
                self.assertEqual(crossings, len(odd))
                self.assertEqual(len(intervals), crossings + len(tangential))
