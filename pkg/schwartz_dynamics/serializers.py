"""
Conversion of results to JSON-compatible data, the run report written by the
`schwartz` command, and CSV export of grid functions.

Serializers are looked up by result type through the class's MRO, so a serializer
registered for a base class applies to its subclasses. Projects can add their own
through the SCHWARTZ_REPORT_SERIALIZERS setting, a dict mapping dotted paths of
result classes to dotted paths of serializer classes.
"""
import csv
import dataclasses
import json
import math
import os
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder
from django.utils.module_loading import import_string

from . import __version__
from .classifier import ClassificationReport
from .conf import get_setting
from .dynamics import CesaroResult
from .expressions import SymbolExpr
from .schwartz import SchwartzFn
from .spectral import DilationWitness, PiecewiseFn, ResolventResult


SCHEMA_VERSION = '1.0'
SCHEMA_PATH = os.path.join(os.path.dirname(__file__), 'schema', 'run_report.schema.json')


def clean_number(value):
    """Floats as JSON numbers, with the non-finite ones spelled out as strings"""
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return value


def to_json(value):
    """Recursively convert a result (or any value inside one) to JSON-compatible data"""
    if value is None or isinstance(value, (bool, np.bool_)):
        return None if value is None else bool(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        return clean_number(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': clean_number(value.real), 'im': clean_number(value.imag)}
    if isinstance(value, np.ndarray):
        return to_json(value.tolist())
    if isinstance(value, dict):
        return {str(key): to_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(item) for item in value]
    if isinstance(value, SymbolExpr):
        return str(value)
    return serializer_registry.get_serializer(type(value)).serialize(value)


class ResultSerializer:
    """Dataclass results become dicts of their (converted) fields; anything else its str()"""
    exclude = ()

    def __init__(self, result_class):
        self.result_class = result_class

    def serialize(self, result):
        if not dataclasses.is_dataclass(result):
            return str(result)
        return {
            field.name: to_json(getattr(result, field.name))
            for field in dataclasses.fields(result)
            if field.name not in self.exclude
        }


class GridFunctionSerializer(ResultSerializer):
    # the sampled values go to CSV
    exclude = ('xs', 'values')


class ClassificationReportSerializer(ResultSerializer):
    def serialize(self, result):
        data = super().serialize(result)
        data['shape']['description'] = result.shape.describe()
        data['rule_ids'] = result.rule_ids
        return data


class PiecewiseFnSerializer(ResultSerializer):
    def serialize(self, result):
        return result.to_json()


class SchwartzFnSerializer(ResultSerializer):
    def serialize(self, result):
        return {
            'name': result.name,
            'description': result.describe(),
            'decay': result.decay.kind,
            'multiplier': to_json(result.multiplier),
            'params': to_json(result.params),
        }


class DilationWitnessSerializer(ResultSerializer):
    def serialize(self, result):
        data = super().serialize(result)
        data['magnitudes'] = to_json(result.magnitudes)
        return data


class SerializerRegistry:
    BASE_SERIALIZERS_BY_RESULT_CLASS = {
        object: ResultSerializer,
        ClassificationReport: ClassificationReportSerializer,
        CesaroResult: GridFunctionSerializer,
        ResolventResult: GridFunctionSerializer,
        PiecewiseFn: PiecewiseFnSerializer,
        SchwartzFn: SchwartzFnSerializer,
        DilationWitness: DilationWitnessSerializer,
    }

    def __init__(self):
        self._scanned_for_serializers = False
        self.serializers_by_result_class = {}

    def _scan_for_serializers(self):
        serializers = dict(self.BASE_SERIALIZERS_BY_RESULT_CLASS)

        for result_path, serializer_path in get_setting('REPORT_SERIALIZERS').items():
            serializers[import_string(result_path)] = import_string(serializer_path)

        self.serializers_by_result_class = serializers
        self._scanned_for_serializers = True

    @lru_cache(maxsize=None)
    def get_serializer(self, result_class):
        # find the serializer class for the most specific class in the result's inheritance tree

        if not self._scanned_for_serializers:
            self._scan_for_serializers()

        for cls in result_class.__mro__:
            if cls in self.serializers_by_result_class:
                serializer_class = self.serializers_by_result_class[cls]
                return serializer_class(result_class)


serializer_registry = SerializerRegistry()


class ReportJSONEncoder(DjangoJSONEncoder):
    def default(self, o):
        if isinstance(o, (np.generic, np.ndarray, complex, Fraction, SymbolExpr)) or dataclasses.is_dataclass(o):
            return to_json(o)
        return super().default(o)


@dataclasses.dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: object
    citations: list
    timing_ms: float
    version: str = __version__
    schema_version: str = SCHEMA_VERSION

    def as_json(self):
        return {
            'schema_version': self.schema_version,
            'command': self.command,
            'inputs': to_json(self.inputs),
            'outputs': to_json(self.outputs),
            'citations': to_json(self.citations),
            'timing_ms': round(self.timing_ms, 3),
            'version': self.version,
        }

    def dumps(self):
        return json.dumps(self.as_json(), cls=ReportJSONEncoder, indent=2, sort_keys=True, ensure_ascii=False)


def write_csv(stream, header, rows):
    writer = csv.writer(stream)
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(cell)) if isinstance(cell, (float, np.floating)) else cell for cell in row])


def complex_rows(xs, values):
    """(x, re, im) rows for a sampled complex-valued function"""
    values = np.asarray(values, dtype=complex)
    return zip(np.asarray(xs, dtype=float), values.real, values.imag)
