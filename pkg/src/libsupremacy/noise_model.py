'''
Circuit-level depolarizing noise mapped onto the edges of the primal cubic
lattice of the surface code.

Every edge error is an odd number of flips coming from a fixed set of noisy
locations (the location incidence). Two-qubit gates contribute with
probability 4p2/15 per marginal axis, single-qubit gates with 2p1/3, and
preparations and measurements with pp and pm.
'''
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict, fields

import numpy as np
import pandas as pd

from .errors import DomainError
from .utils import check_probability, default_workers, split_evenly, RunTimer

logger = logging.getLogger(__name__)

EDGE_COMPONENTS = ('q1', 'q2', 'q3', 'q12', 'q23', 'q31')
EDGE_CSV_COLUMNS = ('p_e',) + EDGE_COMPONENTS + ('order',)
DEFAULT_SEED = 20170101


@dataclass(frozen=True)
class CircuitNoiseParams:
    p1: float = 0.0  # single-qubit gate depolarizing strength
    p2: float = 0.0  # two-qubit gate depolarizing strength
    pp: float = 0.0  # preparation flip
    pm: float = 0.0  # measurement flip

    def __post_init__(self):
        for f in fields(self):
            check_probability(getattr(self, f.name), f.name)

    @classmethod
    def uniform(cls, pe):
        return cls(p1=pe, p2=pe, pp=pe, pm=pe)

    @property
    def is_uniform(self):
        return self.p1 == self.p2 == self.pp == self.pm

    @classmethod
    def from_config(cls, path):
        '''
        Read a plain-text key=value file. Keys are p1, p2, pp, pm, or pe to
        set all four at once (individual keys then override pe).
        '''
        values = dict()
        with open(path) as f:
            for line_number, line in enumerate(f, start=1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise DomainError(f'{path}:{line_number}: expected key=value, got {line!r}')
                key, value = (s.strip() for s in line.split('=', 1))
                if key not in ('pe', 'p1', 'p2', 'pp', 'pm'):
                    raise DomainError(f'{path}:{line_number}: unknown key {key!r}')
                try:
                    values[key] = float(value)
                except ValueError:
                    raise DomainError(f'{path}:{line_number}: {key} is not a number, got {value!r}') from None

        pe = values.pop('pe', 0.0)
        kwargs = {key: pe for key in ('p1', 'p2', 'pp', 'pm')}
        kwargs.update(values)
        return cls(**kwargs)


@dataclass(frozen=True)
class EdgeErrorModel:
    '''
    Edge error probabilities on the primal cubic lattice. q1, q2 (space-like)
    and q3 (time-like) are single-edge rates, q12, q23, q31 are correlated
    two-edge rates. Leading-order values are not clamped; use is_physical.
    '''
    q1: float
    q2: float
    q3: float
    q12: float
    q23: float
    q31: float

    def __post_init__(self):
        for name in EDGE_COMPONENTS:
            if getattr(self, name) < 0.0:
                raise DomainError(f'{name} must be nonnegative, {name} = {getattr(self, name)}')

    @property
    def nu(self):
        return max(self.q1, self.q2, self.q3)

    @property
    def mu(self):
        return max(self.q12, self.q23, self.q31)

    @property
    def is_physical(self):
        return all(getattr(self, name) <= 0.5 for name in EDGE_COMPONENTS)

    def as_dict(self):
        return asdict(self)

    def as_array(self):
        return np.array([getattr(self, name) for name in EDGE_COMPONENTS])

    def to_json(self, **kwargs):
        d = self.as_dict()
        d.update(nu=self.nu, mu=self.mu)
        return json.dumps(d, sort_keys=True, **kwargs)


@dataclass(frozen=True)
class LocationIncidence:
    '''
    For every edge component, the noisy locations whose flips land on it, as
    (source kind, multiplicity) pairs. Source kinds are 'two_qubit',
    'single_qubit', 'prep' and 'meas'.
    '''
    components: dict = field(default_factory=dict)

    @classmethod
    def default(cls):
        return cls({
            'q1':  (('two_qubit', 6), ('single_qubit', 3)),
            'q2':  (('two_qubit', 6), ('single_qubit', 3)),
            'q3':  (('two_qubit', 4), ('prep', 1), ('meas', 1)),
            'q12': (('two_qubit', 2),),
            'q23': (('two_qubit', 2), ('single_qubit', 1)),
            'q31': (('two_qubit', 2), ('single_qubit', 1)),
        })

    def triggers(self, component, params):
        '''(probability, multiplicity) pairs feeding one component.'''
        probs = trigger_probabilities(params)
        return [(probs[source], multiplicity) for source, multiplicity in self.components[component]]


def trigger_probabilities(params):
    return {
        'two_qubit': 4*params.p2/15,
        'single_qubit': 2*params.p1/3,
        'prep': params.pp,
        'meas': params.pm,
    }


def leading_order_coefficients(incidence=None):
    '''d q / d pe at pe = 0 for every component under uniform noise.'''
    incidence = incidence or LocationIncidence.default()
    unit = trigger_probabilities(CircuitNoiseParams.uniform(1.0))
    return {name: sum(unit[source]*m for source, m in incidence.components[name])
            for name in EDGE_COMPONENTS}


def leading_order_edge_model(params, incidence=None):
    incidence = incidence or LocationIncidence.default()
    q = {name: sum(p*m for p, m in incidence.triggers(name, params)) for name in EDGE_COMPONENTS}
    return EdgeErrorModel(**q)


def odd_parity_combination(probs):
    '''
    Probability that an odd number of independent events occur,
    (1 - prod_i (1 - 2 p_i))/2. Every p_i must lie in [0, 1/2].
    '''
    log_product = 0.0
    for p in probs:
        if not (0.0 <= p <= 0.5):
            raise DomainError(f'parity composition needs probabilities in [0, 1/2], got {p}')
        if p == 0.5:
            return 0.5
        log_product += math.log1p(-2*p)
    return -0.5*math.expm1(log_product)


def all_order_edge_model(params, incidence=None):
    incidence = incidence or LocationIncidence.default()
    q = dict()
    for name in EDGE_COMPONENTS:
        probs = []
        for p, m in incidence.triggers(name, params):
            probs.extend([p]*m)
        q[name] = odd_parity_combination(probs)
    return EdgeErrorModel(**q)


@dataclass(frozen=True)
class SampledEdgeModel:
    estimate: EdgeErrorModel
    standard_error: EdgeErrorModel
    n_samples: int
    seed: int
    n_shards: int

    def within(self, reference, n_sigma=4.0):
        '''True when every component is within n_sigma standard errors of reference.'''
        diff = np.abs(self.estimate.as_array() - reference.as_array())
        return bool(np.all(diff <= n_sigma*self.standard_error.as_array()))

    def as_dict(self):
        return {'estimate': self.estimate.as_dict(),
                'standard_error': self.standard_error.as_dict(),
                'n_samples': self.n_samples, 'seed': self.seed, 'n_shards': self.n_shards}


def _sample_shard(triggers, n_samples, seed_sequence, chunk_size=1 << 18):
    # Count samples with odd parity per component for one shard
    rng = np.random.default_rng(seed_sequence)
    counts = [0]*len(triggers)
    remaining = n_samples
    while remaining > 0:
        n = min(chunk_size, remaining)
        for i, component_triggers in enumerate(triggers):
            parity = np.zeros(n, dtype=np.int64)
            for p, m in component_triggers:
                parity ^= rng.binomial(m, p, size=n) & 1
            counts[i] += int(parity.sum())
        remaining -= n
    return counts


def sample_location_model(params, n_samples, seed=DEFAULT_SEED, incidence=None, n_shards=1, workers=None):
    '''
    Monte Carlo estimate of the edge model: every location fires as an
    independent Bernoulli trial and the flips are XOR-ed onto edges.

    The result depends only on (seed, n_shards); workers only decides how
    many processes run the shards.
    '''
    if n_samples < 1:
        raise DomainError(f'n_samples must be at least 1, {n_samples = }')
    if n_shards < 1:
        raise DomainError(f'n_shards must be at least 1, {n_shards = }')
    incidence = incidence or LocationIncidence.default()
    workers = workers or default_workers()

    triggers = [incidence.triggers(name, params) for name in EDGE_COMPONENTS]
    seeds = np.random.SeedSequence(seed).spawn(n_shards)
    sizes = split_evenly(n_samples, n_shards)

    with RunTimer(f'sample_location_model n={n_samples}'):
        if workers == 1 or n_shards == 1:
            shard_counts = [_sample_shard(triggers, n, s) for n, s in zip(sizes, seeds)]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                shard_counts = list(executor.map(_sample_shard, [triggers]*n_shards, sizes, seeds))

    # Fixed reduction order over shards
    totals = np.zeros(len(EDGE_COMPONENTS), dtype=np.int64)
    for counts in shard_counts:
        totals += np.array(counts, dtype=np.int64)

    estimate = totals / n_samples
    stderr = np.sqrt(estimate*(1 - estimate)/n_samples)
    logger.info(f'sampled edge model with {n_samples} samples over {n_shards} shards')
    return SampledEdgeModel(
        EdgeErrorModel(*estimate.tolist()),
        EdgeErrorModel(*stderr.tolist()),
        n_samples, seed, n_shards)


def edge_model_frame(pe_grid, orders=('leading', 'all')):
    '''Rows (p_e, q1..q31, order) for uniform noise over pe_grid.'''
    rows = []
    for pe in pe_grid:
        params = CircuitNoiseParams.uniform(pe)
        for order in orders:
            if order == 'leading':
                model = leading_order_edge_model(params)
            elif order == 'all':
                model = all_order_edge_model(params)
            else:
                raise DomainError(f'Unknown order: {order}')
            rows.append(dict(p_e=pe, **model.as_dict(), order=order))
    return pd.DataFrame(rows, columns=list(EDGE_CSV_COLUMNS))


def run_example():
    for pe in [0.01, 0.0264, 0.0284]:
        params = CircuitNoiseParams.uniform(pe)
        lead = leading_order_edge_model(params)
        full = all_order_edge_model(params)
        print(f'pe = {pe}: nu = {lead.nu:.5f} / {full.nu:.5f}, mu = {lead.mu:.5f} / {full.mu:.5f}')


if __name__ == "__main__":
    run_example()
