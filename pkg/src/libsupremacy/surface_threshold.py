'''
Quantum-supremacy thresholds for the topologically protected surface code.

Errors are detected, not corrected: a run is kept only when every syndrome is
trivial. Long error chains are suppressed when eps/(1-eps) < 1/5, and short
chains around singular qubits keep the injected magic states distillable
when eps/(1-eps) < 0.134. At circuit level the single-edge and correlated
rates (nu, mu) are folded into an effective ratio eps(nu, mu).
'''
import logging
import math
from dataclasses import dataclass

import pandas as pd

from .errors import DomainError, SolverError
from .goal_seek import ThresholdResult, GoalSeekMonotonic, bisect_root, interpolated_crossing
from .noise_model import CircuitNoiseParams, leading_order_edge_model, all_order_edge_model
from .saw import critical_singular_ratio, odds, singular_tail

logger = logging.getLogger(__name__)

# Decoder-based thresholds for universal fault-tolerant computation, quoted
# for comparison only.
STANDARD_CIRCUIT_THRESHOLD = 0.0075
STANDARD_PHENOMENOLOGICAL_THRESHOLD = (0.0293, 0.033)

FIG2_COLUMNS = ('p_e', 'q1_lead', 'q1_all', 'q3_lead', 'q3_all', 'q12_lead', 'q12_all',
                'q23_lead', 'q23_all', 'eps_lead', 'eps_all', 'eps_threshold')


@dataclass(frozen=True)
class CriticalConstants:
    saw_ratio_limit: float = 1/5
    singular_ratio_limit: float = critical_singular_ratio
    msd_threshold: float = (1 - math.sqrt(2)/2)/2

    @property
    def provenance(self):
        return {
            'saw_ratio_limit': 'self-avoiding walk growth: C_l < (6/5) 5^l, series converges for x < 1/5',
            'singular_ratio_limit': 'critical x at which short singular-qubit chains reach the distillation limit',
            'msd_threshold': 'magic state distillation input threshold (1 - sqrt(2)/2)/2',
        }

    def as_dict(self):
        return {'saw_ratio_limit': self.saw_ratio_limit,
                'singular_ratio_limit': self.singular_ratio_limit,
                'msd_threshold': self.msd_threshold}


def effective_epsilon(nu, mu):
    '''sqrt(a (a + 2b)) with a = nu/(1-nu) and b = mu/(1-mu).'''
    for name, value in (('nu', nu), ('mu', mu)):
        if not (0.0 <= value < 1.0):
            raise DomainError(f'{name} must be in [0, 1), {name} = {value}')
    a = odds(nu)
    return math.sqrt(a*(a + 2*odds(mu)))


def _ratio_threshold(ratio_limit):
    # eps/(1-eps) = r has the root r/(1+r); bisection is kept as a cross-check
    if ratio_limit < 0:
        raise DomainError(f'ratio limit must be nonnegative, {ratio_limit = }')
    closed = ratio_limit/(1 + ratio_limit)
    check = bisect_root(odds, 0.0, 1 - 1e-12, target=ratio_limit, xtol=1e-14)
    if abs(check.value - closed) > 1e-9:
        raise SolverError(f'closed form {closed} and bisection {check.value} disagree')
    lo, hi = check.bracket
    return ThresholdResult(closed, 'closed-form', odds(closed) - ratio_limit,
                           (min(lo, closed), max(hi, closed)))


def phenomenological_thresholds(constants=None):
    constants = constants or CriticalConstants()
    return {
        'topological': _ratio_threshold(constants.saw_ratio_limit),
        'singular': _ratio_threshold(constants.singular_ratio_limit),
    }


def edge_model_for_order(order):
    if order in ('leading', 'lead'):
        return leading_order_edge_model
    if order in ('all', 'all-order'):
        return all_order_edge_model
    raise DomainError(f'Unknown order: {order}')


def circuit_objective(pe, order='leading'):
    '''eps(nu, mu) under uniform circuit noise pe.'''
    model = edge_model_for_order(order)(CircuitNoiseParams.uniform(pe))
    return effective_epsilon(model.nu, model.mu)


def circuit_threshold(order='leading', constants=None, **kwargs):
    '''
    Uniform circuit-level error rate p_e at which eps(nu, mu) reaches the
    singular ratio limit. Monotonicity is checked on the bracket first.

    Parameters:
        order: 'leading' or 'all'
        constants: CriticalConstants, default values if None
        **kwargs: Solver options.
                  bracket (tuple, optional): Search interval for p_e. Default is (0.0, 0.1).
                  tolerance (float, optional): Absolute tolerance on p_e. Default is 1e-10.
                  num_check_points (int, optional): Samples used for the monotonicity check. Default is 33.
    '''
    defaults = {'bracket': (0.0, 0.1),
                'tolerance': 1e-10,
                'num_check_points': 33}
    options = {key: kwargs.get(key, value) for key, value in defaults.items()}

    constants = constants or CriticalConstants()
    target = constants.singular_ratio_limit
    edge_model_for_order(order)
    if target == 0:
        return ThresholdResult(0.0, 'closed-form', 0.0, (0.0, 0.0))

    goal = GoalSeekMonotonic(lambda pe: circuit_objective(pe, order), target,
                             tolerance=options['tolerance'], num_check_points=options['num_check_points'])
    result = goal.solve(*options['bracket'])
    logger.info(f'circuit threshold ({order}) p_e = {result.value:.6g}')
    return result


def msd_margin(q_singular, constants=None):
    '''Distance below the distillation threshold; positive means distillable.'''
    constants = constants or CriticalConstants()
    if not (0.0 <= q_singular <= 1.0):
        raise DomainError(f'q_singular must be in [0, 1], {q_singular = }')
    return constants.msd_threshold - q_singular


def fig2_sweep(pe_grid, constants=None):
    '''Leading-order and all-order edge rates and eps(nu, mu) over a grid of p_e.'''
    constants = constants or CriticalConstants()
    rows = []
    for pe in pe_grid:
        if not (0.0 <= pe <= 0.05):
            raise DomainError(f'p_e grid values must be in [0, 0.05], got {pe}')
        params = CircuitNoiseParams.uniform(pe)
        lead = leading_order_edge_model(params)
        full = all_order_edge_model(params)
        rows.append({
            'p_e': pe,
            'q1_lead': lead.q1, 'q1_all': full.q1,
            'q3_lead': lead.q3, 'q3_all': full.q3,
            'q12_lead': lead.q12, 'q12_all': full.q12,
            'q23_lead': lead.q23, 'q23_all': full.q23,
            'eps_lead': effective_epsilon(lead.nu, lead.mu),
            'eps_all': effective_epsilon(full.nu, full.mu),
            'eps_threshold': constants.singular_ratio_limit,
        })
    return pd.DataFrame(rows, columns=list(FIG2_COLUMNS))


def sweep_crossing(frame, column='eps_lead', target=None):
    '''
    p_e read off a fig2_sweep table where column first reaches target
    (the singular ratio limit by default), linearly interpolated between
    grid points. None if the sweep stays below the target.
    '''
    if column not in frame.columns:
        raise DomainError(f'Unknown sweep column: {column}')
    if len(frame) == 0:
        return None
    if target is None:
        target = CriticalConstants().singular_ratio_limit
    return interpolated_crossing(frame['p_e'].tolist(), frame[column].tolist(), target)


def supremacy_summary(pe, order='leading', constants=None, singular_table=None, d=None):
    '''
    Chain edge rates -> eps(nu, mu) -> threshold conditions for one p_e.
    With a singular count table and distance d the singular tail and its
    distillation margin are included.
    '''
    constants = constants or CriticalConstants()
    model = edge_model_for_order(order)(CircuitNoiseParams.uniform(pe))
    ratio = effective_epsilon(model.nu, model.mu)
    summary = {
        'p_e': pe,
        'order': order,
        'nu': model.nu,
        'mu': model.mu,
        'effective_ratio': ratio,
        'topological_ok': ratio < constants.saw_ratio_limit,
        'singular_ok': ratio < constants.singular_ratio_limit,
    }
    if singular_table is not None:
        if d is None:
            raise DomainError('distance d is required with a singular count table')
        # singular_tail takes a probability, convert the ratio back
        q_singular = singular_tail(ratio/(1 + ratio), d, singular_table)
        summary['q_singular'] = q_singular
        summary['msd_margin'] = constants.msd_threshold - q_singular
    summary['below_threshold'] = summary['topological_ok'] and summary['singular_ok']
    return summary


def run_example():
    for name, result in phenomenological_thresholds().items():
        print(f'{name}: {result.value:.5f}')
    for order in ('leading', 'all'):
        print(f'circuit ({order}): {circuit_threshold(order).value:.5f}')


if __name__ == "__main__":
    run_example()
