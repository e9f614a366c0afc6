import math
import os
import time
import logging

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError

logger = logging.getLogger(__name__)

WORKERS_ENV_VAR = 'LIBSUPREMACY_WORKERS'


def find_limit_point_in_list(the_list, val):

    # Quick return if the first entry of the list is the target value
    if the_list[0] == val:
        return 0, 0.0

    # Create a list with True where the corresponding value in the_list
    # is on the other side of the target value and False otherwise
    if the_list[0] > val:
        tf_list = [x <= val for x in the_list]
    else:
        tf_list = [x >= val for x in the_list]

    # Find the first instance of True
    try:
        ind = tf_list.index(True) - 1
    except ValueError:
        # If list does not pass target value, return None
        return None, None

    # Determine where target value is between list items
    if val == the_list[ind]:
        x = 0.0
    else:
        x = (val - the_list[ind]) / (the_list[ind+1] - the_list[ind])

    return ind, x


def interpolate_list(the_list, ind, x=0):

    if (ind is None) or (x is None):
        raise ValueError(f'One or both of ind and x are None ({ind = }) ({x = })')

    if x == 0:
        return the_list[ind]

    return the_list[ind] + (the_list[ind+1] - the_list[ind]) * x


def check_probability(value, name, upper=1.0):
    if not (0.0 <= value <= upper):
        raise DomainError(f'{name} must be in [0, {upper}], {name} = {value}')
    return float(value)


def log_binomial(n, k):
    # Natural log of C(n, k), vectorized over k
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def log_sum_binomial_powers(n, ks, log_x):
    # log of sum_k C(n, k) exp(k*log_x) over the integer array ks
    ks = np.asarray(ks, dtype=float)
    if ks.size == 0:
        return -math.inf
    return float(logsumexp(log_binomial(n, ks) + ks * log_x))


def elementary_symmetric(values):
    '''
    Coefficients e_0..e_S of prod_k (1 + values[k] z).

    e_r is the sum over all r-subsets of the product of their values, which is
    the weight-r part of a sum over fault paths.
    '''
    coeffs = np.zeros(len(values) + 1)
    coeffs[0] = 1.0
    for i, v in enumerate(values):
        coeffs[1:i+2] = coeffs[1:i+2] + v * coeffs[0:i+1]
    return coeffs


def default_workers():
    value = os.environ.get(WORKERS_ENV_VAR, '1')
    try:
        workers = int(value)
    except ValueError:
        raise DomainError(f'{WORKERS_ENV_VAR} must be an integer, got {value!r}')
    return max(1, workers)


def split_evenly(total, parts):
    # Sizes of `parts` consecutive chunks covering range(total)
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


class RunTimer:
    log_each_increment = True

    def __init__(self, label):
        self.label = label
        self.total_run_time = 0.
        self._tic = None

    def __enter__(self):
        self._tic = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.add_to_run_time(self._tic, time.perf_counter())
        return False

    def add_to_run_time(self, tic, toc):
        self.total_run_time += toc - tic
        if self.log_each_increment:
            logger.info(f'{self.label}: adding {toc - tic:0.4f} seconds to total run time.')
