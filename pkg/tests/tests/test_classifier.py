import random
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase, override_settings

from schwartz_dynamics.classifier import (ClassifierConfig, Shape, Status, Verdict, WitnessKind,
                                          check_symbol_conditions, classify, non_me_witness,
                                          uniform_pb_probe)
from schwartz_dynamics.exceptions import PreconditionError
from schwartz_dynamics.expressions import parse_symbol
from schwartz_dynamics.grids import GridSpec
from schwartz_dynamics.polynomials import Poly
from schwartz_dynamics.spectral import InvolutionSymbol

SMALL_PROBE = GridSpec(half_width=100.0, points=2001, refinement_levels=0)


def classify_text(text):
    return classify(parse_symbol(text), symbol_text=text)


class TestSymbolConditions(SimpleTestCase):
    def test_polynomial_is_exact(self):
        check = check_symbol_conditions(parse_symbol('x^2+1'), jmax=3)
        self.assertEqual(check.condition_i, Status.PASS)
        self.assertEqual(check.condition_ii, Status.PASS)
        self.assertTrue(check.exact)
        self.assertEqual([bound.j for bound in check.growth_bounds], [1, 2, 3])
        self.assertIsNotNone(check.k)

    def test_sqrt_shift_passes(self):
        check = check_symbol_conditions(parse_symbol('sqrt(x^2+1)'), jmax=3)
        self.assertEqual(check.condition_i, Status.PASS)
        self.assertEqual(check.condition_ii, Status.PASS)

    def test_bounded_function_fails_condition_ii(self):
        check = check_symbol_conditions(parse_symbol('exp(-x^2)'), jmax=2, probe=SMALL_PROBE)
        self.assertEqual(check.condition_ii, Status.FAIL)
        self.assertIsNotNone(check.counterexample_ii)
        self.assertTrue(check.failed)

    def test_constant_fails_condition_ii(self):
        check = check_symbol_conditions(parse_symbol('3'), jmax=1)
        self.assertEqual(check.condition_ii, Status.FAIL)
        self.assertEqual(check.counterexample_ii, 4.0)

    def test_transcendental_symbols_pass_heuristically(self):
        check = check_symbol_conditions(parse_symbol('x+exp(-x^2)'), jmax=2, probe=SMALL_PROBE)
        self.assertEqual(check.condition_i, Status.HEURISTIC_PASS)
        self.assertEqual(check.condition_ii, Status.HEURISTIC_PASS)

    def test_jmax_must_be_positive(self):
        with self.assertRaises(ValueError):
            check_symbol_conditions(parse_symbol('x'), jmax=0)


class TestClassify(SimpleTestCase):
    golden = [
        ('x^2+1', Verdict.YES, Verdict.YES, 'R2.even_no_fixed_points'),
        ('x^2', Verdict.NO, Verdict.NO, 'R2.fixed_point'),
        ('x^3+2', Verdict.NO, Verdict.NO, 'R2.odd_degree'),
        ('x^2+x+1', Verdict.YES, Verdict.YES, 'R2.even_no_fixed_points'),
        ('x', Verdict.YES, Verdict.YES, 'R1.identity'),
        ('x+1', Verdict.NO, Verdict.NO, 'R1.translation'),
        ('2*x', Verdict.NO, Verdict.NO, 'R1.dilation'),
        ('-x', Verdict.YES, Verdict.YES, 'R1.reflection'),
        ('-x+3', Verdict.YES, Verdict.YES, 'R1.reflection'),
        ('x+exp(-x^2)', Verdict.NO, Verdict.UNKNOWN, 'R3.open'),
        ('sqrt(x^2+1)', Verdict.YES, Verdict.YES, 'R5.sqrt_shift'),
    ]

    def test_golden_table(self):
        for text, power_bounded, mean_ergodic, rule in self.golden:
            with self.subTest(symbol=text):
                report = classify_text(text)
                self.assertEqual(report.power_bounded, power_bounded)
                self.assertEqual(report.mean_ergodic, mean_ergodic)
                self.assertEqual(report.uniformly_mean_ergodic, mean_ergodic)
                self.assertIn(rule, report.rule_ids)
                self.assertTrue(all(citation.citation for citation in report.rules_fired))
                self.assertEqual(report.consistency_errors(), [])

    def test_open_case_is_never_guessed(self):
        report = classify_text('x+exp(-x^2)')
        self.assertEqual(report.mean_ergodic, Verdict.UNKNOWN)
        self.assertEqual(report.shape, Shape('monotone', direction='increasing'))

    def test_shapes(self):
        self.assertEqual(classify_text('x^2+1').shape.describe(), 'polynomial(degree=2, fixed_points=0)')
        self.assertEqual(classify_text('x^2').shape.fixed_point_count, 2)
        self.assertEqual(classify_text('-x+3').shape.describe(), 'affine(a=-1, b=3)')

    def test_witnesses_replay(self):
        for text, kind in [
            ('x+1', WitnessKind.BOUNDED_IMAGE_SEQUENCE),
            ('x^2', WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE),
            ('2*x', WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE),
            ('x^3+2', WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE),
        ]:
            with self.subTest(symbol=text):
                phi = parse_symbol(text)
                report = classify(phi)
                self.assertEqual([witness.kind for witness in report.witnesses], [kind])
                self.assertTrue(report.witnesses[0].validate(phi))

    def test_translation_witness_triples(self):
        witness = classify_text('x+1').witnesses[0]
        self.assertEqual(witness.data['triples'][:3], [(1, -1.0, 0.0), (2, -2.0, 0.0), (3, -3.0, 0.0)])

    def test_supercyclicity_note(self):
        self.assertTrue(any('supercyclic' in note for note in classify_text('x^2+1').notes))

    def test_deterministic(self):
        self.assertEqual(classify_text('x^2+1'), classify_text('x^2+1'))

    def test_rejects_non_symbols(self):
        with self.assertRaises(PreconditionError) as cm:
            classify_text('exp(-x^2)')
        self.assertIn('|φ(x)| >= |x|^(1/k)', cm.exception.hypothesis)
        with self.assertRaises(PreconditionError):
            classify_text('3')

    @override_settings(SCHWARTZ_PROBE_HALF_WIDTH=50.0, SCHWARTZ_MAX_K=32)
    def test_config_from_settings(self):
        config = ClassifierConfig.from_settings(horizon=20)
        self.assertEqual(config.probe.half_width, 50.0)
        self.assertEqual(config.max_k, 32)
        self.assertEqual(config.horizon, 20)



class TestReportInvariants(SimpleTestCase):
    corpus = [text for text, *_ in TestClassify.golden] + [
        'x^2+1/4', 'x^2+1/4+1/1000', 'x^3', 'x^3+x', '-x^3', '-x^3-x+1', 'x^4+1',
        'x^4-3*x^2+1', 'x^5-x', 'x/2', '3*x-1', '-2*x', '-x/2+1', 'x+sin(x)/2',
        'sqrt(x^2+2)',
    ]

    def assertConsistent(self, report):
        if report.power_bounded == Verdict.YES:
            self.assertEqual(report.mean_ergodic, Verdict.YES)
        if report.mean_ergodic == Verdict.NO:
            self.assertEqual(report.power_bounded, Verdict.NO)
        self.assertEqual(report.uniformly_mean_ergodic, report.mean_ergodic)
        shape = report.shape
        decreasing = (
            (shape.kind == 'monotone' and shape.direction == 'decreasing')
            or (shape.kind == 'affine' and shape.a < 0)
        )
        if decreasing or (shape.kind == 'polynomial' and shape.degree >= 2):
            self.assertEqual(report.power_bounded, report.mean_ergodic)

    def test_corpus(self):
        for text in self.corpus:
            with self.subTest(symbol=text):
                self.assertConsistent(classify_text(text))
        for text in ('1+0*x', 'cos(x)/2', 'exp(-x^2)/2'):
            with self.subTest(involution=text):
                self.assertConsistent(classify(InvolutionSymbol(parse_symbol(text))))

    def test_polynomial_rule_agrees_with_a_sign_scan(self):
        rng = random.Random(99)
        for case in range(60):
            degree = rng.randint(2, 6)
            coeffs = [Fraction(rng.randint(-320, 320), 32) for _ in range(degree)]
            coeffs.append(Fraction(rng.choice([-1, 1]) * rng.randint(1, 4)))
            poly = Poly(coeffs)
            displacement = poly - Poly.identity()
            bound = float(displacement.cauchy_bound())
            values = displacement.evaluate(np.linspace(-bound, bound, 200001))
            has_fixed_point = bool(np.any(np.sign(values[1:]) != np.sign(values[:-1])))
            expr = poly.to_expr()
            with self.subTest(case=case, phi=str(expr)):
                report = classify(expr, symbol_text=str(expr))
                self.assertIn('R2', report.rule_ids)
                expected = Verdict.NO if has_fixed_point else Verdict.YES
                self.assertEqual(report.power_bounded, expected)
                self.assertEqual(report.mean_ergodic, expected)
                self.assertEqual(report.shape.fixed_point_count > 0, has_fixed_point)
                self.assertConsistent(report)

class TestWitnessSearch(SimpleTestCase):
    probe = GridSpec(half_width=10.0, points=1001, refinement_levels=0)

    def test_translation(self):
        phi = parse_symbol('x+1')
        witness = non_me_witness(phi, k=1, horizon=50, probe=self.probe)
        self.assertEqual(witness.kind, WitnessKind.BOUNDED_IMAGE_SEQUENCE)
        n, x, value = witness.data['triples'][-1]
        self.assertEqual((n, x, value), (50, -50.0, 0.0))
        self.assertTrue(witness.validate(phi))

    def test_dilation_has_a_bounded_orbit(self):
        phi = parse_symbol('2*x')
        witness = non_me_witness(phi, k=2, horizon=100, probe=self.probe)
        self.assertEqual(witness.kind, WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE)
        self.assertAlmostEqual(witness.data['fixed_point'], 0.0)
        self.assertTrue(witness.validate(phi))

    def test_sqrt_shift_has_no_witness(self):
        self.assertIsNone(non_me_witness(parse_symbol('sqrt(x^2+1)'), horizon=100, probe=self.probe))

    def test_horizon_cap(self):
        with self.assertRaises(ValueError):
            non_me_witness(parse_symbol('x+1'), horizon=10 ** 4 + 1)


class TestUniformProbe(SimpleTestCase):
    def test_sqrt_shift_is_consistent(self):
        result = uniform_pb_probe(parse_symbol('sqrt(x^2+1)'), N=100, jmax=2, probe=SMALL_PROBE, tail_points=32)
        self.assertTrue(result.consistent)
        self.assertEqual([bound.p for bound in result.growth_bounds], [1, 1])

    def test_translation_violates_condition_ii(self):
        result = uniform_pb_probe(parse_symbol('x+1'), N=100, jmax=2, probe=SMALL_PROBE, tail_points=32)
        self.assertEqual(result.status, 'violated')
        # condition (ii) breaks where φ_n(x) = x + n comes back near 0
        self.assertEqual(result.j, 0)
        self.assertLess(result.x, -1.0)

    def test_fast_growth_switches_to_log_mode(self):
        probe = GridSpec(half_width=5.0, points=101, refinement_levels=0)
        result = uniform_pb_probe(parse_symbol('exp(x^2+1)'), N=3, jmax=1, probe=probe, tail_points=0)
        self.assertTrue(result.consistent)
        self.assertIsNotNone(result.log_mode_from)

    def test_horizon_cap(self):
        with self.assertRaises(ValueError):
            uniform_pb_probe(parse_symbol('x+1'), N=201)
