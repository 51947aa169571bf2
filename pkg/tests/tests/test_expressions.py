import math
import random

import numpy as np
from django.test import SimpleTestCase

from schwartz_dynamics.exceptions import DomainError, ExpressionSyntaxError, MagnitudeOverflow
from schwartz_dynamics.expressions import (IDENTITY, Composition, Constant, Difference, FunctionCall,
                                           Negation, Power, Product, Quotient, Sum, compose,
                                           constant_value, iterate_expr, parse_symbol, print_symbol)


def random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.6:
            return IDENTITY
        return Constant(round(rng.uniform(-3, 3), rng.choice([0, 1, 3])) or 0.5)
    kind = rng.randrange(8)
    if kind == 0:
        return Negation(random_tree(rng, depth - 1))
    if kind <= 4:
        operation = (Sum, Difference, Product, Quotient)[kind - 1]
        return operation(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    if kind == 5:
        return Power(random_tree(rng, depth - 1), rng.choice([-3, -2, -1, 2, 3]))
    if kind == 6:
        argument = random_tree(rng, depth - 1)
        name = rng.choice(['sin', 'cos', 'exp', 'sqrt'])
        # keep exp bounded and sqrt real
        if name == 'exp':
            argument = Negation(Power(argument, 2))
        elif name == 'sqrt':
            argument = Sum(Power(argument, 2), Constant(1.0))
        return FunctionCall(name, argument)
    return Composition(random_tree(rng, depth - 1), random_tree(rng, depth - 1))


class TestParser(SimpleTestCase):
    def test_precedence(self):
        phi = parse_symbol('1+2*x^2')
        self.assertEqual(phi, Sum(Constant(1.0), parse_symbol('2*(x^2)')))
        self.assertEqual(phi.evaluate(3.0), 19.0)

    def test_unary_minus_binds_looser_than_power(self):
        self.assertEqual(parse_symbol('-x^2').evaluate(3.0), -9.0)

    def test_functions(self):
        phi = parse_symbol('sqrt(x^2+1)')
        self.assertIsInstance(phi, FunctionCall)
        self.assertAlmostEqual(phi.evaluate(math.sqrt(3)), 2.0)
        self.assertAlmostEqual(parse_symbol('x+exp(-x^2)').evaluate(0.0), 1.0)
        self.assertAlmostEqual(parse_symbol('cos(x)/2').evaluate(0.0), 0.5)

    def test_negative_exponent(self):
        self.assertEqual(parse_symbol('x^(-2)'), Power(IDENTITY, -2))
        self.assertEqual(parse_symbol('x^-2').evaluate(2.0), 0.25)

    def test_whitespace_is_ignored(self):
        self.assertEqual(parse_symbol(' x ^ 2 + 1 '), parse_symbol('x^2+1'))

    def test_vectorized_evaluation(self):
        values = parse_symbol('x^2+1').evaluate(np.array([0.0, 1.0, 2.0]))
        np.testing.assert_array_equal(values, [1.0, 2.0, 5.0])

    def test_non_integer_exponent(self):
        with self.assertRaises(ExpressionSyntaxError) as cm:
            parse_symbol('x^1.5')
        self.assertEqual(cm.exception.position, 3)

    def test_unknown_identifier(self):
        with self.assertRaises(ExpressionSyntaxError) as cm:
            parse_symbol('x+tan(x)')
        self.assertEqual(cm.exception.position, 3)

    def test_unexpected_character(self):
        with self.assertRaises(ExpressionSyntaxError) as cm:
            parse_symbol('x $ 2')
        self.assertEqual(cm.exception.position, 3)

    def test_unbalanced_parentheses(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_symbol('(x+1')
        with self.assertRaises(ExpressionSyntaxError):
            parse_symbol('x+1)')

    def test_empty(self):
        with self.assertRaises(ExpressionSyntaxError) as cm:
            parse_symbol('')
        self.assertEqual(cm.exception.position, 1)


class TestPrinter(SimpleTestCase):
    def test_reparses_to_the_same_tree(self):
        for text in ['x^2+1', 'sqrt(x^2+1)', 'x-(x-1)', '-(x+1)^3', '2/(x^2+1)', 'x+exp(-x^2)', 'x^(-2)+1']:
            tree = parse_symbol(text)
            self.assertEqual(parse_symbol(print_symbol(tree)), tree, text)

    def assertReparsedEvaluatesTheSame(self, tree, xs):
        text = print_symbol(tree)
        reparsed = parse_symbol(text)
        try:
            expected = tree.evaluate(xs)
        except DomainError as e:
            with self.assertRaises(type(e), msg=text):
                reparsed.evaluate(xs)
            return
        np.testing.assert_allclose(reparsed.evaluate(xs), expected, rtol=1e-15, atol=0, err_msg=text)

    def test_reparsed_text_evaluates_the_same(self):
        xs = np.random.default_rng(7).uniform(-3, 3, 100)
        trees = [parse_symbol(text) for text in [
            '-(-x)', '--x^2', '-(-(x+1))^3', 'x^(-3)-(x+1)^-2', '1/(1/x)', 'x*-x',
            'sqrt(x^2+1)^(-1)', '-x^-2', '(-2)^3*x', 'x-(-(x-1))', 'exp(-x^2)/2-cos(x)',
        ]]
        trees += [
            compose(parse_symbol('-x^2+x'), parse_symbol('x-1')),
            compose(parse_symbol('x^(-2)'), parse_symbol('-x')),
            iterate_expr(parse_symbol('sqrt(x^2+1)'), 4),
            Product(Constant(-2.5), Sum(IDENTITY, Constant(-0.125))),
            Difference(IDENTITY, Negation(Constant(-3.0))),
        ]
        for tree in trees:
            with self.subTest(tree=print_symbol(tree)):
                self.assertReparsedEvaluatesTheSame(tree, xs)

    def test_random_trees(self):
        rng = random.Random(2024)
        xs = np.random.default_rng(2024).uniform(-3, 3, 100)
        for _ in range(100):
            tree = random_tree(rng, 4)
            with self.subTest(tree=print_symbol(tree)):
                self.assertReparsedEvaluatesTheSame(tree, xs)

    def test_minimal_brackets(self):
        self.assertEqual(print_symbol(parse_symbol('(x^2)+(1)')), 'x^2+1')
        self.assertEqual(print_symbol(parse_symbol('x-(x-1)')), 'x-(x-1)')


class TestEvaluationErrors(SimpleTestCase):
    def test_sqrt_of_negative(self):
        with self.assertRaises(DomainError) as cm:
            parse_symbol('sqrt(x)').evaluate(np.array([1.0, -2.0]))
        self.assertEqual(cm.exception.x, -2.0)

    def test_division_by_zero(self):
        with self.assertRaises(DomainError):
            parse_symbol('1/x').evaluate(0.0)

    def test_overflow(self):
        with self.assertRaises(MagnitudeOverflow):
            parse_symbol('exp(x)').evaluate(1000.0)


class TestComposition(SimpleTestCase):
    def test_compose(self):
        phi = compose(parse_symbol('x^2'), parse_symbol('x+1'))
        self.assertIsInstance(phi, Composition)
        self.assertEqual(phi.evaluate(2.0), 9.0)
        self.assertEqual(str(phi), '(x+1)^2')

    def test_iterates(self):
        phi = parse_symbol('sqrt(x^2+1)')
        self.assertAlmostEqual(iterate_expr(phi, 5).evaluate(2.0), 3.0)
        self.assertEqual(iterate_expr(phi, 0), IDENTITY)

    def test_domain_error_surfaces_on_evaluation(self):
        phi = compose(parse_symbol('sqrt(x)'), parse_symbol('x-5'))
        with self.assertRaises(DomainError):
            phi.evaluate(1.0)

    def test_constant_value(self):
        self.assertEqual(constant_value(parse_symbol('2*3')), 6.0)
        self.assertIsNone(constant_value(parse_symbol('x+1')))
