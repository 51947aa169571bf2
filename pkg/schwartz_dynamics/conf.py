from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'OVERFLOW_CAP': 1e300,
    'GRID_HALF_WIDTH': 30.0,
    'GRID_POINTS': 4096,
    'GRID_REFINEMENT_LEVELS': 3,
    'GRID_TAIL_EPS': 1e-14,
    'GRID_MAX_EXTENSIONS': 4,
    'PROBE_HALF_WIDTH': 100.0,
    'PROBE_POINTS': 8192,
    'PROBE_TAIL_POINTS': 128,
    'MAX_K': 64,
    'UNIFORM_HORIZON': 100,
    'JMAX': 3,
    'WITNESS_HORIZON': 200,
    'WITNESS_BOUND': 10.0,
    'DISPLACEMENT_FLOOR': 1e-6,
    'REPORT_SERIALIZERS': {},
}


def get_setting(name):
    """
    Return the value of SCHWARTZ_<name> from the Django settings, falling back on the
    package default. Settings are looked up on every call (rather than at import time)
    so that the library can be used without a configured settings module.
    """
    try:
        default = DEFAULTS[name]
    except KeyError:
        raise ImproperlyConfigured(f"Unknown schwartz_dynamics setting {name!r}")

    if not settings.configured:
        return default
    return getattr(settings, 'SCHWARTZ_' + name, default)


def get_positive_setting(name, cast=float):
    value = get_setting(name)
    try:
        value = cast(value)
    except (TypeError, ValueError):
        raise ImproperlyConfigured(f"SCHWARTZ_{name} must be a number, got {value!r}")
    if value <= 0:
        raise ImproperlyConfigured(f"SCHWARTZ_{name} must be positive, got {value!r}")
    return value
