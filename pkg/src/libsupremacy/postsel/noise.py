import itertools
import logging
import math
from dataclasses import dataclass, field

from ..errors import DomainError
from .circuit import SINGLE_QUBIT_GATES, TWO_QUBIT_GATES

logger = logging.getLogger(__name__)

PAULI_BITS = {'I': (0, 0), 'X': (1, 0), 'Y': (1, 1), 'Z': (0, 1)}
TWO_QUBIT_PAULIS = tuple(a + b for a, b in itertools.product('IXYZ', repeat=2) if a + b != 'II')


def pauli_bits(pauli):
    '''(x, z) bit pairs for each qubit of a Pauli string such as 'XZ'.'''
    try:
        return [PAULI_BITS[c] for c in pauli.upper()]
    except KeyError:
        raise DomainError(f'not a Pauli string: {pauli!r}')


@dataclass
class StochasticPauliNoise:
    '''
    Stochastic Pauli noise (1 - eps_k) I + sum_P p_P P . P on each noisy
    location k.

    Parameters
    ----------
    channels : dict
        Location index -> sequence of (Pauli string on the location's
        support, probability). Locations not listed are noiseless.
    '''
    channels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.channels = {int(k): tuple((p.upper(), float(prob)) for p, prob in v)
                         for k, v in sorted(self.channels.items())}
        for k, channel in self.channels.items():
            for pauli, prob in channel:
                if set(pauli) <= {'I'}:
                    raise DomainError(f'location {k}: identity is implicit, got {pauli!r}')
                pauli_bits(pauli)
                if prob < 0:
                    raise DomainError(f'location {k}: negative probability for {pauli}')
            if self.eps(k) >= 1:
                raise DomainError(f'location {k}: total error probability must be below 1, eps = {self.eps(k)}')

    def eps(self, k):
        return math.fsum(prob for _, prob in self.channels.get(k, ()))

    def check(self, circuit):
        for k, channel in self.channels.items():
            if not (0 <= k < circuit.n_locations):
                raise DomainError(f'noise on location {k}, circuit has {circuit.n_locations}')
            support = len(circuit.locations[k].qubits)
            for pauli, _ in channel:
                if len(pauli) != support:
                    raise DomainError(f'location {k}: Pauli {pauli} does not match support size {support}')

    @property
    def noisy_locations(self):
        return [k for k, channel in self.channels.items() if any(prob > 0 for _, prob in channel)]

    def eps_list(self, circuit):
        '''eps_k for every location of the circuit, zero where noiseless.'''
        return [self.eps(k) for k in range(circuit.n_locations)]

    @classmethod
    def depolarizing(cls, circuit, params):
        '''
        Depolarizing noise from CircuitNoiseParams: each non-identity Pauli
        with p1/3 after single-qubit gates and p2/15 after two-qubit gates,
        a flip with pp after preparations and with pm before measurements.
        '''
        channels = dict()
        for k, loc in enumerate(circuit.locations):
            if loc.kind in SINGLE_QUBIT_GATES:
                channels[k] = [(p, params.p1/3) for p in 'XYZ']
            elif loc.kind in TWO_QUBIT_GATES:
                channels[k] = [(p, params.p2/15) for p in TWO_QUBIT_PAULIS]
            elif loc.kind == 'prep_z':
                channels[k] = [('X', params.pp)]
            elif loc.kind == 'prep_x':
                channels[k] = [('Z', params.pp)]
            elif loc.kind == 'meas_z':
                channels[k] = [('X', params.pm)]
            elif loc.kind == 'meas_x':
                channels[k] = [('Z', params.pm)]
        return cls(channels)

    @classmethod
    def iid_xz(cls, circuit, eps):
        '''Every location fails with probability eps as single-qubit X or Z, split evenly.'''
        if not (0 <= eps < 1):
            raise DomainError(f'eps must be in [0, 1), {eps = }')
        channels = dict()
        for k, loc in enumerate(circuit.locations):
            if len(loc.qubits) == 1:
                channels[k] = [('X', eps/2), ('Z', eps/2)]
            else:
                channels[k] = [(p, eps/4) for p in ('XI', 'IX', 'ZI', 'IZ')]
        return cls(channels)

    def as_dict(self):
        return {str(k): [[p, prob] for p, prob in channel] for k, channel in self.channels.items()}
