'''
Error bounds for fault-path expansions.

Standard (no postselection):
    2 prod_k (1 - eps_k) sum_{faulty} prod_{k in path} 2 eps_k/(1 - eps_k)

Postselected on trivial syndromes (stochastic noise only):
    2 sum_{faulty} prod_{k in path} eps_k/(1 - eps_k)

A faulty set is "every path with at least w faulty locations", optionally
refined by an explicit weight enumerator a_r.
'''
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .goal_seek import bisect_root
from .utils import elementary_symmetric, log_binomial, log_sum_binomial_powers

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GateNoiseProfile:
    '''
    Noise strength eps_k of every location. stochastic flags noise of the form
    (1 - eps_k) I + E_k with E_k completely positive, which the postselected
    bound requires.
    '''
    eps: tuple
    stochastic: bool = True

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        if len(eps) == 0:
            raise DomainError('GateNoiseProfile needs at least one location')
        for k, e in enumerate(eps):
            if not (0.0 <= e < 1.0):
                raise DomainError(f'eps_k must be in [0, 1), eps[{k}] = {e}')
        object.__setattr__(self, 'eps', eps)

    @classmethod
    def iid(cls, eps, S, stochastic=True):
        if S < 1:
            raise DomainError(f'location count must be at least 1, {S = }')
        return cls((eps,)*int(S), stochastic)

    @property
    def S(self):
        return len(self.eps)

    @property
    def eps_max(self):
        return max(self.eps)

    @property
    def is_iid(self):
        return all(e == self.eps[0] for e in self.eps)

    def as_dict(self):
        d = {'S': self.S, 'stochastic': self.stochastic}
        if self.is_iid:
            d['eps'] = self.eps[0]
        else:
            d['eps'] = list(self.eps)
        return d


@dataclass(frozen=True)
class FaultySetSpec:
    '''
    Paths with at least w faulty locations are faulty. enumerator, when
    given, maps weight r to the number a_r of faulty paths of that weight.
    '''
    w: int
    enumerator: dict = field(default=None)

    def __post_init__(self):
        if self.w < 1:
            raise DomainError(f'minimum fault weight must be at least 1, w = {self.w}')

    def check(self, S):
        if self.w > S:
            raise DomainError(f'minimum fault weight exceeds location count, w = {self.w}, {S = }')
        if self.enumerator is not None:
            for r, a_r in self.enumerator.items():
                if not (0 <= r <= S):
                    raise DomainError(f'enumerator weight out of range, {r = }, {S = }')
                if a_r < 0 or a_r > math.comb(S, r):
                    raise DomainError(f'enumerator count must be in [0, C(S, r)], a_{r} = {a_r}')

    def as_dict(self):
        d = {'w': self.w}
        if self.enumerator is not None:
            d['enumerator'] = {str(r): a for r, a in sorted(self.enumerator.items())}
        return d


@dataclass(frozen=True)
class BoundReport:
    value: float
    regime: str
    inputs: dict

    def __post_init__(self):
        if self.regime not in ('standard', 'postselected'):
            raise ValueError(f'Unknown regime: {self.regime}')
        if not self.value >= 0:
            raise ValueError(f'bound must be nonnegative, {self.value = }')

    def as_dict(self):
        return {'value': self.value, 'regime': self.regime, 'inputs': self.inputs}


def binomial_tail(S, w, x):
    '''
    sum_{r=w}^{S} C(S, r) x^r, evaluated in log space.

    An empty sum (w > S) is 0.
    '''
    if S < 0 or w < 0:
        raise DomainError(f'S and w must be nonnegative, {S = }, {w = }')
    if x < 0:
        raise DomainError(f'x must be nonnegative, {x = }')
    if w > S:
        return 0.0
    if x == 0:
        return 1.0 if w == 0 else 0.0
    return math.exp(log_sum_binomial_powers(S, np.arange(w, S + 1), math.log(x)))


def _tail_sum(profile, spec, ratio):
    # sum over faulty paths of prod ratio(eps_k)
    if spec.enumerator is not None:
        x = ratio(profile.eps_max)
        return math.fsum(a_r * x**r for r, a_r in spec.enumerator.items() if r >= spec.w)
    if profile.is_iid:
        return binomial_tail(profile.S, spec.w, ratio(profile.eps[0]))
    coeffs = elementary_symmetric([ratio(e) for e in profile.eps])
    return math.fsum(coeffs[spec.w:])


def _inputs(profile, spec):
    d = profile.as_dict()
    d.update(spec.as_dict())
    return d


def standard_error_bound(profile, spec):
    spec.check(profile.S)
    tail = _tail_sum(profile, spec, lambda e: 2*e/(1 - e))
    value = 2*postselection_prob_lower_bound(profile)*tail
    return BoundReport(value, 'standard', _inputs(profile, spec))


def postselected_error_bound(profile, spec):
    if not profile.stochastic:
        raise DomainError('postselected bound needs stochastic noise; '
                          'coherent noise only satisfies ||E_k|| <= 2 eps_k')
    spec.check(profile.S)
    value = 2*_tail_sum(profile, spec, lambda e: e/(1 - e))
    return BoundReport(value, 'postselected', _inputs(profile, spec))


def postselection_prob_lower_bound(profile):
    '''prod_k (1 - eps_k), a lower bound on the probability of trivial syndromes.'''
    return math.exp(math.fsum(math.log1p(-e) for e in profile.eps))


def coherent_noise_norm_bound(eps):
    '''Norm bound 2 eps_k on the error part of a general (coherent) channel.'''
    return 2*np.asarray(eps, dtype=float) if np.ndim(eps) else 2*float(eps)


def postselected_probability_floor(n):
    # Lower bound on the probability of the postselection register, 2^(-6n-4)
    return 2.0**(-6*n - 4)


def kappa_inequality(kappa, n):
    '''
    Left-hand side of the gap condition

        2 e^-k / ((p_y - e^-k) p_y) + e^-k / p_y

    with p_y = 2^(-6n-4). Returns inf where e^-k >= p_y.
    '''
    p_y = postselected_probability_floor(n)
    u = math.exp(-kappa)
    if u >= p_y:
        return math.inf
    return 2*u/((p_y - u)*p_y) + u/p_y


def kappa_budget(n, target_gap=0.5, tolerance=1e-3):
    '''
    Smallest kappa (to within tolerance) such that
    kappa_inequality(kappa, n) < target_gap.
    '''
    if n < 1:
        raise DomainError(f'problem size must be at least 1, {n = }')
    if not (0.0 < target_gap < 1.0):
        raise DomainError(f'target_gap must be in (0, 1), {target_gap = }')

    lo = -math.log(postselected_probability_floor(n))
    step = 1.0
    hi = lo + step
    while kappa_inequality(hi, n) >= target_gap:
        lo = hi
        step *= 2
        hi = lo + step

    result = bisect_root(lambda k: kappa_inequality(k, n) - target_gap, lo, hi, xtol=tolerance)

    # Upper end of the bracket satisfies the strict inequality
    kappa = result.bracket[1]
    while kappa_inequality(kappa, n) >= target_gap:
        kappa = np.nextafter(kappa, math.inf)
    logger.debug(f'kappa_budget({n}, {target_gap}) = {kappa}')
    return float(kappa)


def run_example():
    profile = GateNoiseProfile.iid(0.01, 10)
    spec = FaultySetSpec(2)
    print(standard_error_bound(profile, spec))
    print(postselected_error_bound(profile, spec))
    print(f'kappa_budget(1) = {kappa_budget(1):.3f}')
    print(f'log C(100, 50) = {log_binomial(100, 50):.6f}')


if __name__ == "__main__":
    run_example()
