import argparse
import logging
import math
import re
import time

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from schwartz_dynamics.classifier import ClassifierConfig, check_symbol_conditions, classify
from schwartz_dynamics.dynamics import cesaro_mean, orbit_seminorm_profile, phi_star
from schwartz_dynamics.exceptions import DomainError, ExpressionSyntaxError, PreconditionError
from schwartz_dynamics.expressions import parse_symbol
from schwartz_dynamics.grids import GridSpec
from schwartz_dynamics.schwartz import parse_builtin
from schwartz_dynamics.serializers import RunReport, complex_rows, write_csv
from schwartz_dynamics.spectral import (UNIT_CIRCLE_TOLERANCE, InvolutionSymbol,
                                        dilation_nonsurjectivity_witness, eigenfunction_sqrt,
                                        neumann_resolvent, power_bounded_resolvent,
                                        spectral_citation, spectrum_report)
from schwartz_dynamics.zak import translation_spectrum_witness, zak_inversion, zak_transform

# options added by BaseCommand itself, left out of the echoed inputs
DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color', 'force_color', 'skip_checks', 'stdout', 'stderr',
}
OUTPUT_OPTIONS = {'json', 'out', 'csv', 'subcommand'}


def complex_number(text):
    """'a+bi' (or 'a+bj'), 'bi', 'a'"""
    cleaned = text.strip().replace(' ', '').replace('i', 'j')
    cleaned = re.sub(r'(^|[+-])j', r'\g<1>1j', cleaned)
    try:
        return complex(cleaned)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a complex number of the form a+bi")


def grid_spec(text):
    return GridSpec.parse(text)


def probe_spec(text):
    return GridSpec.parse(text, refinement_levels=0)


def schwartz_function(text):
    return parse_builtin(text)


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help="Print the JSON run report instead of a table")
    common.add_argument('--out', help="Also write the JSON run report to this file")
    common.add_argument('--csv', help="Write sampled grid data to this CSV file")
    return common


class Command(BaseCommand):
    help = "Classify symbols of composition operators on S(R) and run their dynamical and spectral constructions"

    def add_arguments(self, parser):
        common = _common_options()
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        def add(name, help_text, symbol=True):
            subparser = subparsers.add_parser(name, parents=[common], help=help_text)
            if symbol:
                subparser.add_argument('symbol', help="The symbol φ, e.g. 'x^2+1' or 'sqrt(x^2+1)'")
            return subparser

        sub = add('classify', "Decide power boundedness and mean ergodicity of C_φ")
        sub.add_argument('--probe', type=probe_spec, help="Probe grid as L:N")
        sub.add_argument('--horizon', type=int, help="Iterates examined by the uniform bound probe")

        sub = add('symbol-check', "Check the two symbol conditions")
        sub.add_argument('--probe', type=probe_spec, help="Probe grid as L:N")
        sub.add_argument('--jmax', type=int, help="Highest derivative order checked")

        sub = add('orbit', "Seminorms π_n(C_φ^k f) along an orbit")
        sub.add_argument('--f', type=schwartz_function, default='gaussian', help="Builtin, e.g. gaussian, hermite:2, bump:-1:1")
        sub.add_argument('--seminorm', type=int, default=1)
        sub.add_argument('--horizon', type=int, default=50)
        sub.add_argument('--grid', type=grid_spec, help="Grid as L:N")

        sub = add('cesaro', "Cesàro means of an orbit")
        sub.add_argument('--f', type=schwartz_function, default='gaussian')
        sub.add_argument('--seminorm', type=int, default=1)
        sub.add_argument('--horizon', type=int, default=100)
        sub.add_argument('--grid', type=grid_spec)

        sub = add('phistar', "Orbit limits φ*(x) of an increasing symbol")
        sub.add_argument('points', type=float, nargs='+', metavar='x')
        sub.add_argument('--horizon', type=int, default=1000)
        sub.add_argument('--tol', type=float, default=1e-12)

        sub = add('eigen-sqrt', "Eigenfunction of C_φ for φ(x) = sqrt(x^2 + 1)", symbol=False)
        sub.add_argument('--lambda', dest='lam', type=complex_number, required=True)
        sub.add_argument('--depth', type=int)
        sub.add_argument('--psi', type=schwartz_function, help="Bump supported in (1/4, 1/2)")
        sub.add_argument('--grid', type=grid_spec, help="Grid for the CSV samples")

        sub = add('resolvent', "Solve C_φ f - λf = g by the Neumann series")
        sub.add_argument('--lambda', dest='lam', type=complex_number, required=True)
        sub.add_argument('--f', type=schwartz_function, default='gaussian', help="The right-hand side g")
        sub.add_argument('--trunc', type=int)
        sub.add_argument('--power', type=float, default=3.0, help="Decay power p used when |λ| = 1")
        sub.add_argument('--grid', type=grid_spec)

        sub = add('zak', "Zak transform and its inversion", symbol=False)
        sub.add_argument('--f', type=schwartz_function, default='gaussian')
        sub.add_argument('--x', type=float, default=0.0)
        sub.add_argument('--omega', type=float, default=0.0)
        sub.add_argument('--terms', type=int, default=10)

        sub = add('translation-witness', "Zak witness for e^(2πiω) in σ(C_φ), φ(x) = x + 1", symbol=False)
        sub.add_argument('--f', type=schwartz_function, default='gaussian')
        sub.add_argument('--omega', type=float, default=0.0)

        sub = add('dilation-witness', "Non-surjectivity of C_φ - λ for φ(x) = ax", symbol=False)
        sub.add_argument('--a', type=float, required=True)
        sub.add_argument('--lambda', dest='lam', type=complex_number, required=True)
        sub.add_argument('--jmax', type=int, default=8)
        sub.add_argument('--mmax', type=int, default=40)

        sub = add('point-spectrum', "What is known about σ(C_φ) and σ_p(C_φ)")
        sub.add_argument('--probe', type=probe_spec)

        sub = add('involution', "The involution x + y = f(x - y) for an even f", symbol=False)
        sub.add_argument('even_function', help="The even function f, e.g. 'cos(x)/2'")
        sub.add_argument('points', type=float, nargs='*', metavar='x')
        sub.add_argument('--grid', type=grid_spec)

    def handle(self, *args, **options):
        if options['verbosity'] >= 3:
            logging.getLogger('schwartz_dynamics').setLevel(logging.DEBUG)

        subcommand = options['subcommand']
        handler = getattr(self, 'handle_' + subcommand.replace('-', '_'))
        started = time.perf_counter()
        try:
            outputs, citations, rows, csv_data = handler(options)
        except (ExpressionSyntaxError, DomainError) as e:
            raise CommandError(str(e), returncode=1)
        except (PreconditionError, ValueError) as e:
            raise CommandError(str(e), returncode=2)
        elapsed = (time.perf_counter() - started) * 1000

        inputs = {
            key: value for key, value in options.items()
            if key not in DJANGO_OPTIONS and key not in OUTPUT_OPTIONS
        }
        report = RunReport(subcommand, inputs, outputs, list(citations), elapsed)
        text = report.dumps()

        if options['out']:
            with open(options['out'], 'w', encoding='utf-8') as f:
                f.write(text + '\n')
        if options['csv']:
            if csv_data is None:
                raise CommandError(f"{subcommand} has no grid data to write as CSV", returncode=2)
            with open(options['csv'], 'w', newline='', encoding='utf-8') as f:
                write_csv(f, *csv_data)

        if options['json']:
            self.stdout.write(text)
        else:
            width = max(len(label) for label, _ in rows)
            for label, value in rows:
                self.stdout.write(f"{label.ljust(width)}  {value}")

    # Classification

    def handle_classify(self, options):
        config = ClassifierConfig.from_settings(probe=options['probe'], horizon=options['horizon'])
        report = classify(parse_symbol(options['symbol']), config, symbol_text=options['symbol'])
        rows = [
            ('symbol', report.symbol_text),
            ('shape', report.shape.describe()),
            ('power bounded', report.power_bounded.value),
            ('mean ergodic', report.mean_ergodic.value),
            ('uniformly mean ergodic', report.uniformly_mean_ergodic.value),
            ('rules', ', '.join(report.rule_ids)),
        ]
        rows += [('witness', f"{w.kind.value} ({w.rule_ref})") for w in report.witnesses]
        rows += [('note', note) for note in report.notes]
        return report, report.rules_fired, rows, None

    def handle_symbol_check(self, options):
        probe = options['probe']
        check = check_symbol_conditions(parse_symbol(options['symbol']), jmax=options['jmax'], probe=probe)
        rows = [
            ('symbol', options['symbol']),
            ('condition (i)', check.condition_i.value),
            ('condition (ii)', check.condition_ii.value),
            ('k', check.k),
        ]
        rows += [(f"|φ^({b.j})| <=", f"{b.C:.6g} (1 + φ^2)^{b.p}") for b in check.growth_bounds]
        if check.counterexample_i is not None:
            rows.append(('counterexample (i)', check.counterexample_i))
        if check.counterexample_ii is not None:
            rows.append(('counterexample (ii)', check.counterexample_ii))
        rows += [('note', note) for note in check.notes]
        return check, [], rows, None

    # Dynamics

    def handle_orbit(self, options):
        profile = orbit_seminorm_profile(
            parse_symbol(options['symbol']), options['f'], options['seminorm'], options['horizon'], options['grid'],
        )
        rows = [(f"π_{e.n}(C_φ^{k} f)", f"{e.value:.6g} at x={e.argmax_x:.6g}, j={e.argmax_j}")
                for k, e in enumerate(profile.estimates, start=1)]
        rows += [('growth flag', profile.growth_flag), ('grid', f"L={profile.grid.half_width:g}, N={profile.grid.points}")]
        rows += [('note', note) for note in profile.notes]
        csv_rows = [(k, e.value, e.argmax_x, e.argmax_j, e.tail_bound) for k, e in enumerate(profile.estimates, start=1)]
        return profile, [], rows, (('k', 'seminorm', 'argmax_x', 'argmax_j', 'tail_bound'), csv_rows)

    def handle_cesaro(self, options):
        result = cesaro_mean(
            parse_symbol(options['symbol']), options['f'], options['horizon'], options['grid'], options['seminorm'],
        )
        rows = [
            ('N', result.N),
            ('sup norm', f"{result.sup_norm:.6g}"),
            (f"π_{result.seminorm_index}", f"{result.seminorm:.6g}"),
            ('last sup increment', f"{result.sup_increments[-1]:.3g}" if result.sup_increments else '-'),
            ('grid', f"L={result.grid.half_width:g}, N={result.grid.points}, extensions={result.extensions}"),
        ]
        rows += [('note', note) for note in result.notes]
        return result, [], rows, (('x', 'mean'), zip(result.xs, result.values))

    def handle_phistar(self, options):
        phi = parse_symbol(options['symbol'])
        limits = [phi_star(phi, x, options['horizon'], options['tol']) for x in options['points']]
        rows = [(f"φ*({limit.x:g})", f"{limit.value:.12g} ({limit.reason}, {limit.iterations} iterations)")
                for limit in limits]
        return limits, [], rows, (('x', 'limit', 'iterations'), [(l.x, l.value, l.iterations) for l in limits])

    # Spectra

    def handle_eigen_sqrt(self, options):
        result = eigenfunction_sqrt(options['lam'], options['psi'], options['depth'])
        rows = [
            ('λ', result.lam),
            ('depth', result.depth),
            ('residual', f"{result.residual:.3g}"),
            ('sup |f|', f"{result.sup_norm:.6g}"),
            ('validation points', result.validation_points),
        ]
        grid = options['grid'] or GridSpec.from_settings(half_width=math.sqrt(result.depth + 0.25) + 1)
        xs = grid.nodes()
        return result, [spectral_citation('S.sqrt_eigen')], rows, (('x', 're', 'im'), complex_rows(xs, result.function(xs)))

    def handle_resolvent(self, options):
        phi = parse_symbol(options['symbol'])
        lam = options['lam']
        if abs(abs(lam) - 1) <= UNIT_CIRCLE_TOLERANCE:
            result = power_bounded_resolvent(phi, lam, options['f'], options['power'], options['trunc'], options['grid'])
            rule = 'S.power_bounded_resolvent'
        else:
            result = neumann_resolvent(phi, lam, options['f'], options['trunc'], options['grid'])
            rule = 'S.neumann'
        rows = [
            ('λ', result.lam),
            ('terms', result.terms + 1),
            ('residual', f"{result.residual:.3g}"),
            ('converged', result.converged),
        ]
        rows += [('note', note) for note in result.notes]
        return result, [spectral_citation(rule)], rows, (('x', 're', 'im'), complex_rows(result.xs, result.values))

    def handle_zak(self, options):
        f, omega = options['f'], options['omega']
        sample = zak_transform(f, options['x'], omega, options['terms'])
        inversion = zak_inversion(f, omega, options['terms'])
        rows = [
            (f"Zf({options['x']:g}, {omega:g})", f"{sample.value:.12g} ± {sample.error:.3g}"),
            ('∫ Zf e^(-2πixω) dx', f"{inversion.value:.12g}"),
            ('f̂(ω)', f"{inversion.fourier:.12g}"),
            ('difference', f"{inversion.difference:.3g}"),
        ]
        outputs = {'sample': sample, 'inversion': inversion, 'difference': inversion.difference}
        return outputs, [spectral_citation('S.zak_identity')], rows, None

    def handle_translation_witness(self, options):
        witness = translation_spectrum_witness(options['f'], options['omega'])
        rows = [('λ', witness.lam), ('status', witness.status)]
        if witness.in_spectrum:
            rows += [('x', witness.x), ('|Zg(x, ω)|', f"{abs(witness.value):.6g} ± {witness.error:.3g}")]
        else:
            rows.append(('note', witness.note))
        return witness, [spectral_citation('S.translation')], rows, None

    def handle_dilation_witness(self, options):
        witness = dilation_nonsurjectivity_witness(options['a'], options['lam'], options['jmax'], options['mmax'])
        rows = [
            ('a', witness.a),
            ('λ', witness.lam),
            ('inverted', witness.inverted),
            ('case', witness.case),
            ('j', witness.j),
            ('ratio', witness.ratio),
            ('last magnitude', f"{witness.magnitudes[-1]:.6g}"),
            ('cross-check error', f"{witness.cross_check_error:.3g}"),
        ]
        first = 0 if witness.case == 'derivative_at_origin' else 1
        csv_rows = [(m, x, abs(v)) for m, (x, v) in enumerate(zip(witness.points, witness.values), start=first)]
        return witness, [spectral_citation('S.dilation')], rows, (('m', 'x', 'magnitude'), csv_rows)

    def handle_point_spectrum(self, options):
        config = ClassifierConfig.from_settings(probe=options['probe'])
        report = spectrum_report(parse_symbol(options['symbol']), config, options['symbol'])
        rows = [
            ('symbol', report.symbol_text),
            ('point spectrum', report.point_spectrum),
            ('spectrum', report.spectrum),
            ('rules', ', '.join(citation.rule for citation in report.rules_fired)),
        ]
        rows += [('note', note) for note in report.notes]
        return report, report.rules_fired, rows, None

    def handle_involution(self, options):
        phi = InvolutionSymbol(parse_symbol(options['even_function']))
        grid = options['grid'] or GridSpec.from_settings()
        xs = grid.nodes()
        images = phi.evaluate(xs)
        error = float(np.max(np.abs(phi.evaluate(images) - xs) / (1 + np.abs(xs))))
        slopes = phi.jet(xs, 1).derivs[1]
        report = classify(phi, symbol_text=str(phi))
        outputs = {
            'f': options['even_function'],
            'contraction': phi.contraction,
            'slope_bounds': phi.slope_bounds,
            'sampled_slopes': (float(np.min(slopes)), float(np.max(slopes))),
            'involution_error': error,
            'values': [{'x': x, 'phi': phi.evaluate(x)} for x in options['points']],
            'classification': report,
        }
        rows = [
            ('f', options['even_function']),
            ('sup |f\'|', f"{phi.contraction:.6g}"),
            ('φ\' bounds', f"[{phi.slope_bounds[0]:.6g}, {phi.slope_bounds[1]:.6g}]"),
            ('sampled φ\'', f"[{np.min(slopes):.6g}, {np.max(slopes):.6g}]"),
            ('max |φ(φ(x)) - x|/(1+|x|)', f"{error:.3g}"),
            ('classification', ', '.join(report.rule_ids)),
        ]
        rows += [(f"φ({value['x']:g})", f"{value['phi']:.12g}") for value in outputs['values']]
        return outputs, report.rules_fired, rows, (('x', 'phi'), zip(xs, images))
