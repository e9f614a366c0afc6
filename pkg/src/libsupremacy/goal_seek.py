import bisect
import logging
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import SolverError
from .utils import find_limit_point_in_list, interpolate_list

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdResult:
    '''
    A solved threshold.

    value    : the threshold (a probability)
    method   : 'closed-form' or 'bisection'
    residual : objective minus target, evaluated at value
    bracket  : (lo, hi) interval known to contain the root
    '''
    value: float
    method: str
    residual: float
    bracket: tuple

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo <= self.value <= hi):
            raise ValueError(f'value outside bracket, {self.value = }, {self.bracket = }')
        if self.method not in ('closed-form', 'bisection'):
            raise ValueError(f'Unknown method tag: {self.method}')

    def as_dict(self):
        d = asdict(self)
        d['bracket'] = list(self.bracket)
        return d


def bisect_root(function, lo, hi, target=0.0, xtol=1e-12, rtol=0.0, max_iter=500):
    '''
    Bisection for function(x) = target on [lo, hi].

    The interval must bracket the target. Iteration stops once
    hi - lo <= xtol + rtol*|hi|. Returns a ThresholdResult whose value is the
    midpoint of the final bracket.
    '''
    g_lo = function(lo) - target
    g_hi = function(hi) - target

    # Check for quick return
    if g_lo == 0:
        return ThresholdResult(lo, 'bisection', 0.0, (lo, lo))
    if g_hi == 0:
        return ThresholdResult(hi, 'bisection', 0.0, (hi, hi))
    if np.sign(g_lo) == np.sign(g_hi):
        raise SolverError(f'Interval does not bracket the target, {lo = }, {hi = }, {g_lo = }, {g_hi = }')

    for i in range(max_iter):
        if hi - lo <= xtol + rtol*abs(hi):
            break
        mid = 0.5*(lo + hi)
        if mid <= lo or mid >= hi:
            # Interval cannot shrink further in floating point
            break
        g_mid = function(mid) - target
        logger.debug(f'bisection iteration {i}: [{lo}, {hi}] g(mid) = {g_mid}')
        if g_mid == 0:
            return ThresholdResult(mid, 'bisection', 0.0, (mid, mid))
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    else:
        logger.warning(f'bisection stopped after {max_iter} iterations, width {hi - lo}')

    value = 0.5*(lo + hi)
    return ThresholdResult(value, 'bisection', function(value) - target, (lo, hi))


def first_crossing(inputs, outputs, target):
    '''
    Bracket of the first place where outputs pass target along inputs.

    Returns (lo, hi) or None if the list never reaches the target.
    '''
    ind, x = find_limit_point_in_list(list(outputs), target)
    if ind is None:
        return None
    if x == 0.0:
        return inputs[ind], inputs[ind]
    return inputs[ind], inputs[ind+1]


def interpolated_crossing(inputs, outputs, target):
    '''Linear interpolation of the input at which outputs first reach target, None if never.'''
    ind, x = find_limit_point_in_list(list(outputs), target)
    if ind is None:
        return None
    return float(interpolate_list(list(inputs), ind, x))


class GoalSeekMonotonic:
    '''
    A class for solving function(x) = target_output when the relationship
    between the input and output is monotonically increasing or monotonically
    decreasing. Monotonicity is checked on the sampled data before solving.
    '''

    def __init__(self, function, target_output, tolerance=1e-10, num_check_points=33):
        self.function = function
        self.target_output = target_output
        self.tolerance = tolerance
        self.num_check_points = num_check_points

        self._data_input = []
        self._data_output = []
        self._is_increasing = None

    def add_data(self, new_input, new_output):
        ind = bisect.bisect_right(self._data_input, new_input)
        self._data_input.insert(ind, new_input)
        self._data_output.insert(ind, new_output)

        # Check if output is monotonic and set self._is_increasing
        is_increasing = self._is_increasing
        for i in range(1, len(self._data_output)):
            if self._data_output[i-1] == self._data_output[i]:
                continue
            if is_increasing is None:
                is_increasing = (self._data_output[i-1] < self._data_output[i])
            elif is_increasing != (self._data_output[i-1] < self._data_output[i]):
                raise SolverError('Output is not monotonic')
        self._is_increasing = is_increasing

    def check_bracket(self, lo, hi):
        for x in np.linspace(lo, hi, self.num_check_points):
            self.add_data(float(x), self.function(float(x)))
        if math.isnan(sum(self._data_output)):
            raise SolverError('Objective is not finite on the bracket')

    def solve(self, lo, hi):
        self.check_bracket(lo, hi)
        bracket = first_crossing(self._data_input, self._data_output, self.target_output)
        if bracket is None:
            raise SolverError(f'Target {self.target_output} is not reached on [{lo}, {hi}]')
        return bisect_root(self.function, bracket[0], bracket[1], self.target_output, xtol=self.tolerance)
