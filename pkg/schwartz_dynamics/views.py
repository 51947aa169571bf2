import time

from django.http import JsonResponse
from django.views.decorators.http import require_GET

from .classifier import classify
from .exceptions import DomainError, ExpressionSyntaxError, PreconditionError
from .expressions import parse_symbol
from .serializers import ReportJSONEncoder, RunReport
from .spectral import spectrum_report


def _error_response(error, status=400):
    data = {'error': str(error), 'kind': type(error).__name__}
    if isinstance(error, ExpressionSyntaxError):
        data['position'] = error.position
    if isinstance(error, PreconditionError):
        data['hypothesis'] = error.hypothesis
    return JsonResponse(data, status=status)


def _run(request, command, compute):
    symbol_text = request.GET.get('symbol', '')
    if not symbol_text:
        return JsonResponse({'error': "the 'symbol' parameter is required", 'kind': 'MissingParameter'}, status=400)

    started = time.perf_counter()
    try:
        result = compute(parse_symbol(symbol_text), symbol_text)
    except (ExpressionSyntaxError, DomainError, PreconditionError) as e:
        return _error_response(e)
    elapsed = (time.perf_counter() - started) * 1000

    report = RunReport(command, {'symbol': symbol_text}, result, list(result.rules_fired), elapsed)
    return JsonResponse(report.as_json(), encoder=ReportJSONEncoder, json_dumps_params={'indent': 2})


@require_GET
def classify_symbol(request):
    """
    Classify C_φ for the symbol in the `symbol` query parameter; the response is the
    same run report that `manage.py schwartz classify --json` prints.
    """
    return _run(request, 'classify', lambda phi, text: classify(phi, symbol_text=text))


@require_GET
def point_spectrum(request):
    return _run(request, 'point-spectrum', lambda phi, text: spectrum_report(phi, symbol_text=text))
