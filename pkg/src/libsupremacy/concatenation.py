import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .errors import DomainError
from .goal_seek import ThresholdResult, bisect_root, first_crossing
from .utils import check_probability

logger = logging.getLogger(__name__)

MODES = ('correction', 'detection')


@dataclass(frozen=True)
class ConcatenationScheme:
    '''
    A level-l gate is built from at most M level-(l-1) gates of a distance-d
    code, concatenated L times. Error correction fixes t = (d-1)//2 errors,
    error detection flags up to d-1.
    '''
    M: int
    d: int
    L: int = 1
    t: int = field(init=False)

    def __post_init__(self):
        if self.M < 1 or self.d < 1:
            raise DomainError(f'M and d must be at least 1, M = {self.M}, d = {self.d}')
        if self.L < 0:
            raise DomainError(f'L must be nonnegative, L = {self.L}')
        if self.d > self.M:
            warnings.warn(f'distance exceeds gate count (d = {self.d}, M = {self.M}); '
                          'level maps beyond the gate count are identically zero')
        object.__setattr__(self, 't', (self.d - 1)//2)

    def min_failing_weight(self, mode):
        # Fewest faulty sub-gates that defeat the code
        check_mode(mode)
        return self.t + 1 if mode == 'correction' else self.d

    def leading_coefficient(self, mode):
        '''C = C(M, t+1) for correction and C' = C(M, d) for detection.'''
        return math.comb(self.M, self.min_failing_weight(mode))

    def as_dict(self):
        return {'M': self.M, 'd': self.d, 't': self.t, 'L': self.L}


def check_mode(mode):
    if mode not in MODES:
        raise DomainError(f'Unknown mode: {mode}')


def level_map_correction(eps, scheme):
    '''sum_{r=t+1}^{M} C(M, r) eps^r (1-eps)^(M-r)'''
    check_probability(eps, 'eps')
    return float(binom.sf(scheme.t, scheme.M, eps))


def level_map_detection(eps, scheme):
    '''sum_{r=d}^{M} C(M, r) eps^r (1-eps)^(M-r)'''
    check_probability(eps, 'eps')
    return float(binom.sf(scheme.d - 1, scheme.M, eps))


def level_map(eps, scheme, mode):
    check_mode(mode)
    if mode == 'correction':
        return level_map_correction(eps, scheme)
    return level_map_detection(eps, scheme)


@dataclass(frozen=True)
class ConcatThreshold:
    '''
    Threshold estimates for one scheme and mode.

    rough       : 1/C^(1/(w-1)) with the exact leading coefficient C
    asymptotic  : 2/M^2 (correction) or sqrt(6)/M^(3/2) (detection), d = 3 only
    exact       : nontrivial fixed point of the level map, None if there is none
    '''
    mode: str
    coefficient: int
    rough: float
    asymptotic: float
    exact: ThresholdResult

    @property
    def has_threshold(self):
        return self.exact is not None

    def as_dict(self):
        return {
            'mode': self.mode,
            'coefficient': self.coefficient,
            'rough': self.rough,
            'asymptotic': self.asymptotic,
            'exact': None if self.exact is None else self.exact.as_dict(),
        }


def _fixed_point_grid():
    return np.concatenate([np.logspace(-12, math.log10(0.5), 241, endpoint=False),
                           np.linspace(0.5, 1 - 1e-9, 201)])


def exact_fixed_point(scheme, mode, rtol=1e-12):
    '''Nontrivial fixed point of the level map in (0, 1), or None.'''
    def g(eps):
        return level_map(eps, scheme, mode) - eps

    grid = _fixed_point_grid()
    values = [g(x) for x in grid]
    if values[0] >= 0:
        # Map at or above the identity from the start, errors never shrink
        logger.info(f'no fixed point for {scheme} in {mode} mode')
        return None
    bracket = first_crossing(grid, values, 0.0)
    if bracket is None:
        return None
    return bisect_root(g, float(bracket[0]), float(bracket[1]), xtol=0.0, rtol=rtol)


def threshold_estimate(scheme, mode):
    check_mode(mode)
    w = scheme.min_failing_weight(mode)
    C = scheme.leading_coefficient(mode)
    rough = C**(-1/(w - 1)) if w > 1 else None

    asymptotic = None
    if scheme.d == 3:
        if mode == 'correction':
            asymptotic = 2/scheme.M**2
        else:
            asymptotic = math.sqrt(6)/scheme.M**1.5

    return ConcatThreshold(mode, C, rough, asymptotic, exact_fixed_point(scheme, mode))


def supremacy_gain(M):
    '''
    Ratio of the detection threshold sqrt(6)/M^(3/2) to the correction
    threshold 2/M^2 for d = 3, which grows as sqrt(M).
    '''
    if M < 10:
        raise DomainError(f'asymptotic gain needs M >= 10, {M = }')
    return (math.sqrt(6)/M**1.5)/(2/M**2)


def iterate_levels(eps0, scheme, mode):
    '''Error rates eps^(0), ..., eps^(L) under repeated application of the level map.'''
    check_probability(eps0, 'eps0')
    eps = [float(eps0)]
    for _ in range(scheme.L):
        eps.append(level_map(eps[-1], scheme, mode))
    return eps


def faulty_norm_bound(eps, scheme, mode, level):
    '''
    Closed bound (a eps)^(w^level)/a on the faulty part after `level`
    concatenation levels, with a = C^(1/(w-1)) and w the failing weight.
    '''
    check_probability(eps, 'eps')
    w = scheme.min_failing_weight(mode)
    if w < 2:
        raise DomainError(f'failing weight {w} gives no suppression in {mode} mode')
    if eps == 0:
        return 0.0
    log_a = math.log(scheme.leading_coefficient(mode))/(w - 1)
    exponent = w**level*(log_a + math.log(eps)) - log_a
    # Above threshold the bound is vacuous long before it overflows
    return math.exp(exponent) if exponent < 700 else math.inf


def run_example():
    for M in [10, 100, 400]:
        scheme = ConcatenationScheme(M, 3)
        corr = threshold_estimate(scheme, 'correction')
        det = threshold_estimate(scheme, 'detection')
        print(f'M = {M}: correction {corr.exact.value:.4e}, detection {det.exact.value:.4e}, '
              f'gain {supremacy_gain(M):.3f}')


if __name__ == "__main__":
    run_example()
