'''
Command-line entry point. Every subcommand writes one artifact (JSON or CSV)
carrying the program version and an echo of its inputs.

Exit codes: 0 success, 1 domain/solver/resource error, 2 usage error.
'''
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import __version__
from .bounds import GateNoiseProfile, FaultySetSpec, standard_error_bound, postselected_error_bound, \
    postselection_prob_lower_bound, kappa_budget
from .concatenation import ConcatenationScheme, threshold_estimate, iterate_levels, MODES
from .errors import DomainError, ResourceLimitError, SolverError
from .noise_model import CircuitNoiseParams, DEFAULT_SEED, leading_order_edge_model, all_order_edge_model, \
    sample_location_model, EDGE_CSV_COLUMNS
from .postsel import StochasticPauliNoise, builtin_names, load_circuit, read_netlist, \
    minimal_sparse_weight, verify_theorem1
from .saw import count_saws, naive_count_saws, verify_saw_bound, DEFAULT_CEILING
from .surface_threshold import CriticalConstants, phenomenological_thresholds, circuit_threshold, fig2_sweep, \
    sweep_crossing

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.9g'
DEFAULT_FIG2_GRID = tuple(round(0.005*i, 3) for i in range(1, 9))


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    output: str = None
    format: str = 'json'
    seed: int = DEFAULT_SEED
    version: str = __version__

    @classmethod
    def from_args(cls, args):
        options = {k: v for k, v in vars(args).items()
                   if k not in ('command', 'output', 'format', 'seed', 'verbose')}
        fmt = args.format or DEFAULT_FORMATS.get(args.command, 'json')
        return cls(args.command, options, args.output, fmt, args.seed if args.seed is not None else DEFAULT_SEED)

    def inputs(self):
        d = {k: v for k, v in self.options.items() if v is not None}
        d['seed'] = self.seed
        return d


@dataclass
class Artifact:
    '''Result of one subcommand: a JSON-able dict and, for tabular output, a DataFrame.'''
    result: dict
    frame: pd.DataFrame = None


########################################################################
# Output
########################################################################

def _to_builtin(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f'Object of type {type(obj).__name__} is not JSON serializable')


def format_json(config, result):
    doc = {'command': config.command, 'version': config.version,
           'inputs': config.inputs(), 'result': result}
    return json.dumps(doc, sort_keys=True, indent=2, default=_to_builtin) + '\n'


def format_csv(config, frame):
    header = [f'# libsupremacy {config.version}', f'# command: {config.command}']
    header.extend(f'# {k} = {v}' for k, v in sorted(config.inputs().items()))
    body = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return '\n'.join(header) + '\n' + body


def write_text(text, output):
    if output is None or output == '-':
        sys.stdout.write(text)
    elif hasattr(output, 'write'):
        output.write(text)
    else:
        with open(output, 'w', newline='\n') as f:
            f.write(text)


########################################################################
# Subcommands
########################################################################

def _noise_params(options):
    if options.get('config'):
        return CircuitNoiseParams.from_config(options['config'])
    pe = options.get('pe') or 0.0
    kwargs = {key: options.get(key) if options.get(key) is not None else pe
              for key in ('p1', 'p2', 'pp', 'pm')}
    return CircuitNoiseParams(**kwargs)


def run_edges(config):
    params = _noise_params(config.options)
    order = config.options.get('order', 'both')
    result = {'params': {'p1': params.p1, 'p2': params.p2, 'pp': params.pp, 'pm': params.pm}}
    rows = []
    pe = params.p1 if params.is_uniform else float('nan')
    if order in ('leading', 'both'):
        model = leading_order_edge_model(params)
        result['leading'] = dict(model.as_dict(), nu=model.nu, mu=model.mu)
        rows.append(dict(p_e=pe, **model.as_dict(), order='leading'))
    if order in ('all', 'both'):
        model = all_order_edge_model(params)
        result['all'] = dict(model.as_dict(), nu=model.nu, mu=model.mu)
        rows.append(dict(p_e=pe, **model.as_dict(), order='all'))
    if order == 'mc':
        sampled = sample_location_model(params, config.options['samples'], config.seed,
                                        n_shards=config.options.get('shards') or 1)
        result['monte_carlo'] = sampled.as_dict()
        rows.append(dict(p_e=pe, **sampled.estimate.as_dict(), order='mc'))
    return Artifact(result, pd.DataFrame(rows, columns=list(EDGE_CSV_COLUMNS)))


def _parse_eps(text):
    values = [float(v) for v in str(text).split(',') if v.strip()]
    if not values:
        raise DomainError(f'no noise strength given in {text!r}')
    return values


def run_bounds(config):
    opts = config.options
    eps = _parse_eps(opts['eps'])
    if len(eps) == 1:
        profile = GateNoiseProfile.iid(eps[0], opts['locations'], stochastic=not opts.get('coherent'))
    else:
        profile = GateNoiseProfile(eps, stochastic=not opts.get('coherent'))
    spec = FaultySetSpec(opts['min_weight'])
    if opts.get('postselected'):
        report = postselected_error_bound(profile, spec)
    else:
        report = standard_error_bound(profile, spec)
    result = report.as_dict()
    result['postselection_prob_lower_bound'] = postselection_prob_lower_bound(profile)
    if opts.get('kappa_n'):
        result['kappa'] = kappa_budget(opts['kappa_n'], opts.get('gap') or 0.5)
    return Artifact(result)


def run_concat(config):
    opts = config.options
    scheme = ConcatenationScheme(opts['gates'], opts['distance'], opts['levels'])
    modes = MODES if opts.get('mode', 'both') == 'both' else (opts['mode'],)
    frame = pd.DataFrame({'level': range(scheme.L + 1)})
    result = {'scheme': scheme.as_dict(), 'thresholds': {}, 'levels': {}}
    for mode in modes:
        estimate = threshold_estimate(scheme, mode)
        levels = iterate_levels(opts['eps0'], scheme, mode)
        result['thresholds'][mode] = estimate.as_dict()
        result['levels'][mode] = levels
        frame[f'eps_{mode}'] = levels
        frame[f'threshold_{mode}'] = estimate.exact.value if estimate.has_threshold else float('nan')
        frame[f'rough_{mode}'] = estimate.rough if estimate.rough is not None else float('nan')
    return Artifact(result, frame)


def run_saw(config):
    opts = config.options
    if opts.get('naive'):
        table = naive_count_saws(opts['max_length'])
    else:
        table = count_saws(opts['max_length'], ceiling=opts.get('ceiling') or DEFAULT_CEILING)
    report = verify_saw_bound(table)
    frame = table.to_frame()
    frame = frame[frame['l'] >= 1].reset_index(drop=True)
    result = {'counts': {str(l): c for l, c in table.counts.items()}, 'bound': report.as_dict()}
    return Artifact(result, frame)


def _constants(options):
    if options.get('singular_ratio') is None:
        return CriticalConstants()
    return CriticalConstants(singular_ratio_limit=options['singular_ratio'])


def run_phenom(config):
    solutions = phenomenological_thresholds(_constants(config.options))
    result = {name: s.value for name, s in solutions.items()}
    result['solutions'] = {name: s.as_dict() for name, s in solutions.items()}
    frame = pd.DataFrame([{'name': name, 'threshold': s.value} for name, s in solutions.items()])
    return Artifact(result, frame)


def run_circuit(config):
    order = config.options.get('order') or 'leading'
    solution = circuit_threshold(order, _constants(config.options))
    result = {'threshold': solution.value, 'order': order, 'solution': solution.as_dict()}
    return Artifact(result, pd.DataFrame([{'order': order, 'threshold': solution.value}]))


def _parse_grid(text):
    if text is None:
        return list(DEFAULT_FIG2_GRID)
    text = str(text).strip()
    if not text:
        return []
    try:
        if ':' in text:
            start, stop, step = (float(v) for v in text.split(':'))
        else:
            return [float(v) for v in text.split(',')]
    except ValueError:
        raise DomainError(f'cannot read grid {text!r}, expected start:stop:step or a comma-separated list') from None
    if not step > 0:
        raise DomainError(f'grid step must be positive, got {step}')
    n = int(round((stop - start)/step)) + 1
    return [round(start + i*step, 12) for i in range(max(n, 0))]


def emit_fig2_sweep(grid, output=None, config=None):
    '''Write the p_e sweep of edge rates and eps(nu, mu) as CSV; returns the DataFrame.'''
    config = config or RunConfig('fig2', {'grid': ','.join(str(g) for g in grid)}, output, 'csv')
    frame = fig2_sweep(grid)
    write_text(format_csv(config, frame), output)
    return frame


def run_fig2(config):
    grid = _parse_grid(config.options.get('grid'))
    frame = fig2_sweep(grid)
    crossing = {order: sweep_crossing(frame, f'eps_{order}') for order in ('lead', 'all')}
    logger.info(f'sweep crossing of the singular ratio limit: {crossing}')
    return Artifact({'rows': frame.to_dict(orient='records'), 'crossing': crossing}, frame)


def run_validate(config):
    opts = config.options
    if opts.get('netlist'):
        circuit = read_netlist(opts['netlist'])
    else:
        circuit = load_circuit(opts.get('circuit') or 'parity')
    if opts.get('eps') is not None:
        noise = StochasticPauliNoise.iid_xz(circuit, opts['eps'])
    else:
        noise = StochasticPauliNoise.depolarizing(circuit, CircuitNoiseParams.uniform(opts.get('pe') or 0.0))

    w = opts.get('min_weight') or minimal_sparse_weight(circuit, noise)
    w = min(w, circuit.n_locations)
    check = verify_theorem1(circuit, noise, FaultySetSpec(w), weight_cutoff=opts.get('cutoff'))
    result = check.to_dict()
    result['simulation'] = check.report.to_dict()
    result['circuit'] = circuit.name
    return Artifact(result)


HANDLERS = {
    'edges': run_edges,
    'bounds': run_bounds,
    'concat': run_concat,
    'saw': run_saw,
    'phenom': run_phenom,
    'circuit': run_circuit,
    'fig2': run_fig2,
    'validate': run_validate,
}

DEFAULT_FORMATS = {'saw': 'csv', 'fig2': 'csv', 'concat': 'csv'}


def dispatch(config):
    '''Run one subcommand and write its artifact. Returns the exit code.'''
    if config.command not in HANDLERS:
        build_parser().print_help(sys.stderr)
        sys.stderr.write(f'\nunknown subcommand: {config.command}\n')
        return 2
    try:
        artifact = HANDLERS[config.command](config)
    except (DomainError, SolverError, ResourceLimitError) as e:
        logger.error(f'{config.command} failed: {e}')
        sys.stderr.write(f'error: {e}\n')
        return 1

    if config.format == 'csv':
        if artifact.frame is None:
            sys.stderr.write(f'error: {config.command} has no CSV output, use --format json\n')
            return 2
        text = format_csv(config, artifact.frame)
    else:
        text = format_json(config, artifact.result)
    write_text(text, config.output)
    return 0


########################################################################
# Parser
########################################################################

def build_parser():
    parser = argparse.ArgumentParser(
        prog='libsupremacy',
        description='Noise thresholds for quantum supremacy under postselection.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for progress, -vv for solver iterations')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-o', '--output', default=None, help='output file (default: stdout)')
    common.add_argument('--format', choices=('json', 'csv'), default=None)
    common.add_argument('--seed', type=int, default=DEFAULT_SEED)

    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('edges', parents=[common], help='edge error model from circuit noise')
    p.add_argument('--pe', type=float, default=None, help='uniform p1 = p2 = pp = pm')
    for key in ('p1', 'p2', 'pp', 'pm'):
        p.add_argument(f'--{key}', type=float, default=None)
    p.add_argument('--config', default=None, help='key=value file with pe or p1, p2, pp, pm')
    p.add_argument('--order', choices=('leading', 'all', 'both', 'mc'), default='both')
    p.add_argument('--samples', type=int, default=10**6)
    p.add_argument('--shards', type=int, default=1)

    p = sub.add_parser('bounds', parents=[common], help='standard and postselected error bounds')
    p.add_argument('--eps', required=True, help='noise strength, or a comma-separated list per location')
    p.add_argument('--locations', type=int, default=None, help='location count S for iid noise')
    p.add_argument('--min-weight', type=int, required=True, help='minimum faulty weight w')
    p.add_argument('--postselected', action='store_true')
    p.add_argument('--coherent', action='store_true', help='noise is not stochastic')
    p.add_argument('--kappa-n', type=int, default=None, help='also solve the kappa budget for this n')
    p.add_argument('--gap', type=float, default=None)

    p = sub.add_parser('concat', parents=[common], help='concatenated code thresholds')
    p.add_argument('--gates', type=int, required=True, help='M')
    p.add_argument('--distance', type=int, required=True, help='d')
    p.add_argument('--levels', type=int, default=3, help='L')
    p.add_argument('--eps0', type=float, default=0.0)
    p.add_argument('--mode', choices=MODES + ('both',), default='both')

    p = sub.add_parser('saw', parents=[common], help='self-avoiding walk counts on Z^3')
    p.add_argument('--max-length', type=int, required=True)
    p.add_argument('--naive', action='store_true', help='use the reference enumerator')
    p.add_argument('--ceiling', type=int, default=DEFAULT_CEILING)

    p = sub.add_parser('phenom', parents=[common], help='phenomenological thresholds')
    p.add_argument('--singular-ratio', type=float, default=None)

    p = sub.add_parser('circuit', parents=[common], help='circuit-level threshold p_e')
    p.add_argument('--order', choices=('leading', 'all'), default='leading')
    p.add_argument('--singular-ratio', type=float, default=None)

    p = sub.add_parser('fig2', parents=[common], help='edge rates and eps(nu, mu) over p_e')
    p.add_argument('--grid', default=None, help='start:stop:step or comma-separated p_e values')

    p = sub.add_parser('validate', parents=[common], help='exact check of the postselected bounds')
    p.add_argument('--circuit', choices=builtin_names(), default='parity')
    p.add_argument('--netlist', default=None, help='circuit netlist file instead of a built-in')
    p.add_argument('--pe', type=float, default=None, help='depolarizing strength')
    p.add_argument('--eps', type=float, default=None, help='iid X/Z noise instead of depolarizing')
    p.add_argument('--cutoff', type=int, default=None, help='fault weight cutoff')
    p.add_argument('--min-weight', type=int, default=None, help='faulty weight w (default: searched)')

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level={0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG),
                        format='%(levelname)s %(name)s: %(message)s')
    if args.command == 'bounds' and args.locations is None and ',' not in args.eps:
        parser.error('--locations is required with a single --eps value')
    return dispatch(RunConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
