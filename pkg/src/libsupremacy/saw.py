'''
Self-avoiding walks on the simple cubic lattice and the error-chain series
built on them.

A connected error chain of length l on the cubic syndrome lattice is bounded
by a self-avoiding walk, so with x = eps/(1-eps)

    topological tail   poly(n) sum_{l>=d} C_l x^l       (needs 5x < 1)
    singular tail      sum_{l=1}^{d} C'_l x^l

where C_l counts origin-rooted walks and C'_l counts walks producing short
logical errors near singular qubits (supplied as data).
'''
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import pandas as pd

from .errors import DivergenceError, DomainError, InputDataError, ResourceLimitError
from .utils import check_probability, default_workers, RunTimer

logger = logging.getLogger(__name__)

critical_singular_ratio = 0.134
saw_growth_limit = 5
DEFAULT_CEILING = 14


@dataclass
class SawTable:
    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = {int(l): int(c) for l, c in sorted(self.counts.items())}
        if not self.counts:
            raise DomainError('SawTable is empty')
        for l, c in self.counts.items():
            if l < 0 or c < 0:
                raise DomainError(f'lengths and counts must be nonnegative, C_{l} = {c}')
        if self.counts.get(0, 1) != 1:
            raise DomainError(f'C_0 must be 1, C_0 = {self.counts[0]}')
        if self.counts.get(1, 6) != 6:
            raise DomainError(f'C_1 must be 6, C_1 = {self.counts[1]}')

    def __getitem__(self, l):
        return self.counts[l]

    def __contains__(self, l):
        return l in self.counts

    @property
    def max_length(self):
        return max(self.counts)

    def to_frame(self):
        return pd.DataFrame({'l': list(self.counts), 'count': list(self.counts.values())})

    def to_csv(self, path_or_buf=None):
        return self.to_frame().to_csv(path_or_buf, index=False)

    @classmethod
    def from_csv(cls, path):
        return cls(_read_count_csv(path))


@dataclass
class SingularCountTable:
    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = {int(l): int(c) for l, c in sorted(self.counts.items())}
        for l, c in self.counts.items():
            if l < 1 or c < 0:
                raise InputDataError(f'singular counts need l >= 1 and count >= 0, C\'_{l} = {c}')

    @classmethod
    def from_csv(cls, path):
        return cls(_read_count_csv(path))


def _read_count_csv(path):
    df = pd.read_csv(path, comment='#')
    missing = {'l', 'count'} - set(df.columns)
    if missing:
        raise InputDataError(f'{path}: missing columns {sorted(missing)}')
    if df[['l', 'count']].isna().any().any():
        raise InputDataError(f'{path}: blank entries in count table')
    return dict(zip(df['l'].astype(int), df['count'].astype(int)))


@dataclass(frozen=True)
class ChainWeightParams:
    nu: float  # max single-edge rate
    mu: float  # max correlated-pair rate

    def __post_init__(self):
        for name in ('nu', 'mu'):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise DomainError(f'{name} must be in [0, 1), {name} = {value}')


########################################################################
# Enumeration
########################################################################

def _lattice(l_max):
    # Flat occupancy array wide enough that no walk reaches the border
    side = 2*l_max + 3
    offsets = (1, -1, side, -side, side*side, -side*side)
    origin = (l_max + 1)*(1 + side + side*side)
    return bytearray(side**3), offsets, origin


def _extend(visited, pos, depth, l_max, offsets, counts):
    counts[depth] += 1
    if depth == l_max - 1:
        # Last step: count free neighbours instead of descending
        counts[l_max] += sum(1 for o in offsets if not visited[pos + o])
        return
    for o in offsets:
        nxt = pos + o
        if not visited[nxt]:
            visited[nxt] = 1
            _extend(visited, nxt, depth + 1, l_max, offsets, counts)
            visited[nxt] = 0


def _count_prefix(prefix, l_max):
    '''Walk counts per length l >= len(prefix) for walks beginning with prefix.'''
    visited, offsets, pos = _lattice(l_max)
    visited[pos] = 1
    for direction in prefix:
        pos += offsets[direction]
        visited[pos] = 1
    counts = [0]*(l_max + 1)
    if len(prefix) == l_max:
        counts[l_max] = 1
    else:
        _extend(visited, pos, len(prefix), l_max, offsets, counts)
    return counts


def _symmetry_prefixes(l_max):
    '''
    Walk prefixes with their symmetry weights. The first step is taken along
    +x (6 equivalent choices); the second continues along +x (weight 6) or
    turns to +y (4 equivalent turns, weight 24). When l_max >= 3 every prefix
    is extended by one more step so there are enough independent tasks.
    '''
    prefixes = [((0, 0), 6), ((0, 2), 24)]
    if l_max < 3:
        return prefixes
    extended = []
    for prefix, weight in prefixes:
        last = prefix[-1]
        for direction in range(6):
            if direction == last ^ 1:
                continue
            extended.append((prefix + (direction,), weight))
    return extended


def count_saws(l_max, ceiling=DEFAULT_CEILING, workers=None):
    '''
    Exact self-avoiding walk counts C_0..C_{l_max} on Z^3 by backtracking,
    using the cubic symmetry for the first two steps. Prefix subtrees run in
    parallel and are combined by integer addition.
    '''
    if l_max < 1:
        raise DomainError(f'l_max must be at least 1, {l_max = }')
    if l_max > ceiling:
        raise ResourceLimitError(f'l_max = {l_max} exceeds the enumeration ceiling {ceiling}')
    workers = workers or default_workers()

    counts = {0: 1, 1: 6}
    if l_max == 1:
        return SawTable(counts)

    prefixes = _symmetry_prefixes(l_max)
    prefix_length = len(prefixes[0][0])
    if prefix_length == 3:
        counts[2] = sum(weight for (_, weight) in _symmetry_prefixes(2))

    with RunTimer(f'count_saws l_max={l_max}'):
        tasks = [prefix for prefix, _ in prefixes]
        if workers == 1:
            results = [_count_prefix(prefix, l_max) for prefix in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                results = list(executor.map(_count_prefix, tasks, [l_max]*len(tasks)))

    for l in range(prefix_length, l_max + 1):
        counts[l] = sum(weight*result[l] for (_, weight), result in zip(prefixes, results))
    logger.info(f'enumerated self-avoiding walks up to length {l_max}: C_{l_max} = {counts[l_max]}')
    return SawTable(counts)


def naive_count_saws(l_max, ceiling=10):
    '''Reference enumerator without symmetry reduction, on coordinate tuples.'''
    if l_max < 1:
        raise DomainError(f'l_max must be at least 1, {l_max = }')
    if l_max > ceiling:
        raise ResourceLimitError(f'l_max = {l_max} exceeds the naive ceiling {ceiling}')

    steps = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    counts = [0]*(l_max + 1)

    def walk(site, visited, length):
        counts[length] += 1
        if length == l_max:
            return
        for step in steps:
            nxt = (site[0] + step[0], site[1] + step[1], site[2] + step[2])
            if nxt not in visited:
                visited.add(nxt)
                walk(nxt, visited, length + 1)
                visited.remove(nxt)

    walk((0, 0, 0), {(0, 0, 0)}, 0)
    return SawTable(dict(enumerate(counts)))


@dataclass(frozen=True)
class SawBoundReport:
    passed: bool
    max_ratio: float
    ratios: dict
    violations: list

    def as_dict(self):
        return {'passed': self.passed, 'max_ratio': self.max_ratio,
                'ratios': {str(l): r for l, r in self.ratios.items()},
                'violations': list(self.violations)}


def verify_saw_bound(table):
    '''
    Check C_l <= (6/5) 5^l and C_{l+1} <= 5 C_l for every stored length and
    report the largest ratio C_l/((6/5) 5^l).
    '''
    ratios = dict()
    violations = []
    for l, c in table.counts.items():
        if l < 1:
            continue
        # Integer form of C_l <= (6/5) 5^l
        if 5*c > 6*saw_growth_limit**l:
            violations.append(l)
        # C_1 = 6 C_0 is the one step with six choices
        if l >= 2 and (l - 1) in table and c > saw_growth_limit*table[l - 1]:
            violations.append(l)
        ratios[l] = c/(1.2*saw_growth_limit**l)
    if not ratios:
        raise DomainError('SawTable has no lengths >= 1 to check')
    violations = sorted(set(violations))
    for l in violations:
        logger.warning(f'self-avoiding walk bound violated at l = {l}, C_l = {table[l]}')
    return SawBoundReport(not violations, max(ratios.values()), ratios, violations)


########################################################################
# Series
########################################################################

@dataclass(frozen=True)
class TailBound:
    bound: float
    partial: float
    remainder: float

    def as_dict(self):
        return {'bound': self.bound, 'partial': self.partial, 'remainder': self.remainder}


def odds(eps):
    return eps/(1 - eps)


def topological_tail(eps, d, poly_factor=1.0, table=None):
    '''
    poly_factor * sum_{l>=d} C_l x^l with x = eps/(1-eps). Stored counts are
    summed exactly; lengths beyond the table use C_l <= (6/5) 5^l, giving the
    geometric remainder (6/5) (5x)^L0 / (1 - 5x).
    '''
    check_probability(eps, 'eps')
    if d < 1:
        raise DomainError(f'd must be at least 1, {d = }')
    if poly_factor < 0:
        raise DomainError(f'poly_factor must be nonnegative, {poly_factor = }')
    if eps == 0:
        return TailBound(0.0, 0.0, 0.0)
    x = odds(eps) if eps < 1 else math.inf
    if saw_growth_limit*x >= 1:
        raise DivergenceError(f'eps/(1-eps) = {x} >= 1/5; the chain series '
                              'converges to zero if eps/(1-eps) < 1/5')
    table = table or count_saws(8)

    l_stop = table.max_length
    for l in range(d, l_stop + 1):
        if l not in table:
            raise InputDataError(f'SawTable is missing C_{l}')
    partial = math.fsum(table[l]*x**l for l in range(d, l_stop + 1))

    L0 = max(d, l_stop + 1)
    r = saw_growth_limit*x
    remainder = 1.2*r**L0/(1 - r)
    return TailBound(poly_factor*(partial + remainder), poly_factor*partial, poly_factor*remainder)


def singular_tail(eps, d, table):
    '''sum_{l=1}^{d} C'_l x^l with x = eps/(1-eps).'''
    check_probability(eps, 'eps')
    if eps == 1:
        raise DomainError('singular tail is undefined at eps = 1')
    if d < 1:
        raise DomainError(f'd must be at least 1, {d = }')
    missing = [l for l in range(1, d + 1) if l not in table.counts]
    if missing:
        raise InputDataError(f'singular count table is missing lengths {missing}')
    if eps == 0:
        return 0.0
    x = odds(eps)
    return math.fsum(table.counts[l]*x**l for l in range(1, d + 1))


def chain_weight_exact(l, params):
    '''
    Weight of a chain of l edges where up to l//2 neighbouring pairs may be
    flipped together by a correlated error:
        sum_k C(l//2, k) 2^k a^(l-k) b^k,  a = nu/(1-nu), b = mu/(1-mu)
    '''
    if l < 1:
        raise DomainError(f'l must be at least 1, {l = }')
    a, b = odds(params.nu), odds(params.mu)
    h = l//2
    return math.fsum(math.comb(h, k)*2**k*a**(l - k)*b**k for k in range(h + 1))


def chain_weight_bound(l, params):
    '''a^(l - l//2) (a + 2b)^(l//2), equal to chain_weight_exact by the binomial theorem.'''
    if l < 1:
        raise DomainError(f'l must be at least 1, {l = }')
    a, b = odds(params.nu), odds(params.mu)
    h = l//2
    return a**(l - h)*(a + 2*b)**h


def run_example():
    table = count_saws(8)
    print(table.to_frame())
    print(verify_saw_bound(table))
    print(topological_tail(0.05, 5, table=table))


if __name__ == "__main__":
    run_example()
