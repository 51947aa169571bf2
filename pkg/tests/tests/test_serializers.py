import io
import json
import math
from fractions import Fraction

import jsonschema
import numpy as np
from django.test import SimpleTestCase, override_settings

from schwartz_dynamics.classifier import ClassificationReport, Verdict, classify
from schwartz_dynamics.expressions import parse_symbol
from schwartz_dynamics.grids import GridSpec
from schwartz_dynamics.schwartz import gaussian
from schwartz_dynamics.serializers import (SCHEMA_PATH, ClassificationReportSerializer, RunReport,
                                           SerializerRegistry, complex_rows, to_json,
                                           write_csv)
from schwartz_dynamics.spectral import dilation_nonsurjectivity_witness


class RuleCountSerializer(ClassificationReportSerializer):
    def serialize(self, result):
        return {'rules': len(result.rules_fired)}


def load_schema():
    with open(SCHEMA_PATH) as f:
        return json.load(f)


class TestToJson(SimpleTestCase):
    def test_numbers(self):
        self.assertEqual(to_json(np.float64(1.5)), 1.5)
        self.assertEqual(to_json(np.int64(3)), 3)
        self.assertEqual(to_json(Fraction(1, 4)), 0.25)
        self.assertEqual(to_json(math.nan), 'nan')
        self.assertEqual(to_json([math.inf, -math.inf]), ['inf', '-inf'])
        self.assertEqual(to_json(complex(1, math.inf)), {'re': 1.0, 'im': 'inf'})
        self.assertIs(to_json(np.bool_(True)), True)

    def test_containers(self):
        self.assertEqual(to_json((1, np.array([2.0, 3.0]))), [1, [2.0, 3.0]])
        self.assertEqual(to_json({1: Verdict.UNKNOWN}), {'1': 'unknown'})
        self.assertEqual(to_json(parse_symbol('x^2+1')), 'x^2+1')

    def test_dataclasses(self):
        self.assertEqual(
            to_json(GridSpec(half_width=10.0, points=101)),
            {'half_width': 10.0, 'points': 101, 'refinement_levels': 3, 'tail_eps': 1e-14},
        )

    def test_schwartz_function(self):
        data = to_json(gaussian().scaled(2.0))
        self.assertEqual(data['description'], '2.0*gaussian')
        self.assertEqual(data['multiplier'], 2.0)

    def test_classification_report(self):
        data = to_json(classify(parse_symbol('x+1'), symbol_text='x+1'))
        self.assertEqual(data['power_bounded'], 'no')
        self.assertIn('R1.translation', data['rule_ids'])
        self.assertEqual(data['shape']['description'], 'affine(a=1, b=1)')
        self.assertEqual(data['witnesses'][0]['kind'], 'bounded_image_sequence')

    def test_dilation_witness_magnitudes(self):
        data = to_json(dilation_nonsurjectivity_witness(2.0, 0.5, mmax=5))
        self.assertEqual(len(data['magnitudes']), 5)
        self.assertEqual(data['case'], 'growth_at_powers')


class TestSerializerRegistry(SimpleTestCase):
    def test_most_specific_class_wins(self):
        registry = SerializerRegistry()
        self.assertIsInstance(registry.get_serializer(ClassificationReport), ClassificationReportSerializer)
        self.assertEqual(type(registry.get_serializer(int)).__name__, 'ResultSerializer')

    @override_settings(SCHWARTZ_REPORT_SERIALIZERS={
        'schwartz_dynamics.classifier.ClassificationReport': 'tests.tests.test_serializers.RuleCountSerializer',
    })
    def test_serializers_from_settings(self):
        registry = SerializerRegistry()
        serializer = registry.get_serializer(ClassificationReport)
        self.assertIsInstance(serializer, RuleCountSerializer)
        self.assertEqual(serializer.serialize(classify(parse_symbol('x'))), {'rules': 2})


class TestRunReport(SimpleTestCase):
    def test_matches_the_schema(self):
        report = classify(parse_symbol('x^2+1'), symbol_text='x^2+1')
        run = RunReport(
            'classify', {'symbol': 'x^2+1', 'probe': GridSpec(half_width=100.0, points=8192)},
            report, list(report.rules_fired), 12.3456,
        )
        data = json.loads(run.dumps())
        jsonschema.validate(data, load_schema())
        self.assertEqual(data['timing_ms'], 12.346)
        self.assertEqual(data['outputs']['mean_ergodic'], 'yes')

    def test_schema_rejects_unknown_keys(self):
        run = RunReport('zak', {}, {}, [], 1.0)
        data = json.loads(run.dumps())
        data['extra'] = 1
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate(data, load_schema())


class TestCsv(SimpleTestCase):
    def test_complex_rows(self):
        stream = io.StringIO()
        write_csv(stream, ('x', 're', 'im'), complex_rows([0.0, 0.5], [1 + 2j, 0.1]))
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], 'x,re,im')
        self.assertEqual(lines[1], '0.0,1.0,2.0')
        self.assertEqual(lines[2], '0.5,0.1,0.0')
