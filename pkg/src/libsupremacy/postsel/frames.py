'''
Pauli-frame propagation through Clifford circuits.

A fault is a Pauli applied right after its location (preparation or gate) or
right before it (measurement). The frame is conjugated through every later
gate; a Z-basis measurement flips when the frame carries X on its qubit and
an X-basis measurement flips when it carries Z. Flips are linear over GF(2),
so the flip pattern of a path is the XOR of the patterns of its faults.
'''
import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, UnsupportedCircuitError
from .noise import pauli_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FaultPath:
    '''A set of faulty locations, each with the Pauli it applies.'''
    faults: tuple = ()

    def __post_init__(self):
        faults = tuple(sorted((int(k), p.upper()) for k, p in self.faults))
        locations = [k for k, _ in faults]
        if len(set(locations)) != len(locations):
            raise DomainError(f'a location can fail only once per path, got {faults}')
        object.__setattr__(self, 'faults', faults)

    @property
    def order(self):
        return len(self.faults)

    def weight(self, noise):
        '''prod_{k in path} p(P_k) * prod_{k noisy, not in path} (1 - eps_k)'''
        chosen = dict(self.faults)
        w = 1.0
        for k in noise.channels:
            if k in chosen:
                w *= dict(noise.channels[k]).get(chosen[k], 0.0)
            else:
                w *= 1 - noise.eps(k)
        for k in chosen:
            if k not in noise.channels:
                return 0.0
        return w

    def as_list(self):
        return [[k, p] for k, p in self.faults]


def _apply_gate(kind, qubits, fx, fz):
    # Conjugate the frame through one gate; fx, fz index qubits on their last axis
    if kind in ('i', 'prep_z', 'prep_x'):
        return
    if kind == 'h':
        q, = qubits
        tmp = fx[..., q].copy()
        fx[..., q] = fz[..., q]
        fz[..., q] = tmp
    elif kind == 's':
        q, = qubits
        fz[..., q] ^= fx[..., q]
    elif kind == 'cnot':
        c, t = qubits
        fx[..., t] ^= fx[..., c]
        fz[..., c] ^= fz[..., t]
    elif kind == 'cz':
        a, b = qubits
        fz[..., a] ^= fx[..., b]
        fz[..., b] ^= fx[..., a]
    else:
        raise UnsupportedCircuitError(f'{kind} is not a Clifford location the frame simulator supports')


def _apply_pauli(pauli, qubits, fx, fz):
    for q, (x, z) in zip(qubits, pauli_bits(pauli)):
        fx[q] ^= bool(x)
        fz[q] ^= bool(z)


def _check_path(circuit, path):
    for k, pauli in path.faults:
        if not (0 <= k < circuit.n_locations):
            raise DomainError(f'fault on location {k}, circuit has {circuit.n_locations}')
        if len(pauli) != len(circuit.locations[k].qubits):
            raise DomainError(f'location {k}: Pauli {pauli} does not match the location support')


def path_flip_mask(circuit, path):
    '''Measurement flips of a path as an integer, bit j for measurement ordinal j.'''
    _check_path(circuit, path)
    faults = dict(path.faults)
    fx = np.zeros(circuit.n_qubits, dtype=bool)
    fz = np.zeros(circuit.n_qubits, dtype=bool)
    mask = 0
    j = 0
    for k, loc in enumerate(circuit.locations):
        if loc.is_measurement:
            if k in faults:
                _apply_pauli(faults[k], loc.qubits, fx, fz)
            q = loc.qubits[0]
            flipped = fx[q] if loc.kind == 'meas_z' else fz[q]
            if flipped:
                mask |= 1 << j
            j += 1
            continue
        _apply_gate(loc.kind, loc.qubits, fx, fz)
        if k in faults:
            _apply_pauli(faults[k], loc.qubits, fx, fz)
    return mask


def propagate_path(circuit, path):
    '''Flip (1) or no flip (0) of every measurement outcome, in measurement order.'''
    mask = path_flip_mask(circuit, path)
    return tuple((mask >> j) & 1 for j in range(circuit.n_measurements))


def fault_flip_masks(circuit, noise):
    '''
    Flip mask of every single fault of the noise model, as
    {location: [(pauli, probability, mask), ...]} over noisy locations.
    '''
    noise.check(circuit)
    masks = dict()
    for k in noise.noisy_locations:
        masks[k] = [(pauli, prob, path_flip_mask(circuit, FaultPath(((k, pauli),))))
                    for pauli, prob in noise.channels[k] if prob > 0]
    return masks
