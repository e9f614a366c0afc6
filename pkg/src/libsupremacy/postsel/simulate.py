'''
Exact and sampled output distributions of small noisy Clifford circuits with
postselection on trivial syndromes.

Stochastic Pauli noise through a Clifford circuit only flips measurement
outcomes, and the flip of a fault path does not depend on the ideal outcome.
The noisy measurement record is therefore the ideal record XOR the path's
flip mask, and

    p(record) = sum_f F(f) p_ideal(record ^ f)

where F is the distribution of flip masks over fault paths.
'''
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import stim

from ..bounds import GateNoiseProfile, FaultySetSpec, postselected_error_bound, postselection_prob_lower_bound
from ..errors import DomainError, ResourceLimitError, UnsupportedCircuitError
from ..noise_model import DEFAULT_SEED
from ..utils import default_workers, elementary_symmetric, split_evenly, RunTimer
from .circuit import PORTS
from .frames import FaultPath, fault_flip_masks
from .noise import TWO_QUBIT_PAULIS

logger = logging.getLogger(__name__)

MAX_STATE_QUBITS = 16
MAX_PATHS = 10**7
TOLERANCE = 1e-12

_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j*np.pi/4)])
_H = np.array([[1, 1], [1, -1]])/np.sqrt(2)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]).reshape(2, 2, 2, 2)
_CZ = np.diag([1, 1, 1, -1]).reshape(2, 2, 2, 2)
_GATES = {'h': _H, 's': _S, 't': _T, 'cnot': _CNOT, 'cz': _CZ}


########################################################################
# Ideal circuit
########################################################################

def _apply_unitary(psi, U, qubits):
    k = len(qubits)
    psi = np.tensordot(U, psi, axes=(list(range(k, 2*k)), list(qubits)))
    return np.moveaxis(psi, list(range(k)), list(qubits))


def ideal_record_distribution(circuit):
    '''
    Probability of every measurement record (bit j for measurement ordinal j)
    of the noiseless circuit, from a state vector with all measurements
    deferred to the end.
    '''
    n = circuit.n_qubits
    if n > MAX_STATE_QUBITS:
        raise ResourceLimitError(f'state vector of {n} qubits exceeds the limit of {MAX_STATE_QUBITS}')
    psi = np.zeros((2,)*n, dtype=complex)
    psi[(0,)*n] = 1.0

    measured = []
    for loc in circuit.locations:
        if loc.kind in ('prep_z', 'i'):
            continue
        if loc.kind == 'prep_x':
            psi = _apply_unitary(psi, _H, loc.qubits)
        elif loc.kind == 'meas_x':
            psi = _apply_unitary(psi, _H, loc.qubits)
            measured.append(loc.qubits[0])
        elif loc.kind == 'meas_z':
            measured.append(loc.qubits[0])
        else:
            psi = _apply_unitary(psi, _GATES[loc.kind], loc.qubits)

    probs = np.abs(psi)**2
    # Last measurement first, so the flattened index has bit j for measurement j
    unmeasured = [q for q in range(n) if q not in measured]
    probs = np.transpose(probs, measured[::-1] + unmeasured)
    probs = probs.reshape(2**len(measured), -1).sum(axis=1)
    return probs/probs.sum()


class PortMap:
    '''Port values (as packed integers) of every measurement record of a circuit.'''

    def __init__(self, circuit):
        self.circuit = circuit
        self.n_records = 2**circuit.n_measurements
        self.widths = circuit.port_widths()
        records = np.arange(self.n_records)
        masks = circuit.port_masks()
        self.values = dict()
        for port in PORTS:
            value = np.zeros(self.n_records, dtype=np.int64)
            for i, m in enumerate(masks[port]):
                value |= (_parity(records & m) << i)
            self.values[port] = value
        self.xy = self.values['x'] | (self.values['y'] << self.widths['x'])
        self.n_xy = 2**(self.widths['x'] + self.widths['y'])

    def xy_key(self, xy):
        wx, wy = self.widths['x'], self.widths['y']
        return _bits(xy, wx) + '|' + _bits(xy >> wx, wy)

    def joint_key(self, record):
        return '|'.join(_bits(int(self.values[port][record]), self.widths[port]) for port in PORTS)

    def xy_distribution(self, record_probs):
        return np.bincount(self.xy, weights=record_probs, minlength=self.n_xy)


def _parity(values):
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros_like(values)
    while np.any(values):
        out ^= values & 1
        values = values >> 1
    return out


def _bits(value, width):
    return ''.join(str((value >> i) & 1) for i in range(width))


def _xor_convolve(flip_probs, record_probs):
    records = np.arange(len(record_probs))
    out = np.zeros(len(record_probs))
    for f in np.flatnonzero(flip_probs):
        out += flip_probs[f]*record_probs[records ^ f]
    return out


class SparseTest:
    '''
    A flip mask is sparse when postselection discards it (some syndrome bit
    flips) or when it leaves the ideal (x, y) distribution unchanged.
    '''

    def __init__(self, circuit, ideal_records=None):
        self.ports = PortMap(circuit)
        if ideal_records is None:
            ideal_records = ideal_record_distribution(circuit)
        check_deterministic_syndrome(self.ports, ideal_records)
        self.ideal_xy = self.ports.xy_distribution(ideal_records)
        self._cache = dict()

    def __call__(self, mask):
        if mask not in self._cache:
            if self.ports.values['z'][mask] != 0:
                sparse = True
            else:
                shift = int(self.ports.xy[mask])
                shifted = self.ideal_xy[np.arange(self.ports.n_xy) ^ shift]
                sparse = bool(np.all(np.abs(shifted - self.ideal_xy) <= TOLERANCE))
            self._cache[mask] = sparse
        return self._cache[mask]


def check_deterministic_syndrome(ports, ideal_records):
    mass = math.fsum(ideal_records[ports.values['z'] != 0])
    if mass > TOLERANCE:
        raise UnsupportedCircuitError(f'noiseless syndrome is not deterministically trivial, p(z != 0) = {mass:.3g}')


########################################################################
# Exact distributions
########################################################################

@dataclass
class SimReport:
    '''
    ideal           : p(x, y) of the noiseless circuit, keyed 'x|y'
    joint           : p(x, y, z) of the noisy circuit, keyed 'x|y|z'
    conditional     : p(x, y | z = 0), None when q_z0 = 0
    q_z0            : probability of trivial syndromes
    delta           : l1 distance between conditional and ideal
    sparse_mass     : total weight of paths that postselection rejects or
                      that leave the ideal output unchanged
    covered_mass    : total weight of the enumerated paths
    truncation_bound: bound on the weight of the paths beyond the cutoff
    '''
    ideal: dict
    joint: dict
    conditional: dict
    q_z0: float
    delta: float
    sparse_mass: float
    covered_mass: float
    truncation_bound: float = None
    weight_cutoff: int = None
    n_paths: int = None

    def to_dict(self):
        return {
            'ideal': self.ideal,
            'joint': self.joint,
            'conditional': self.conditional,
            'q_z0': self.q_z0,
            'delta': self.delta,
            'sparse_mass': self.sparse_mass,
            'covered_mass': self.covered_mass,
            'truncation_bound': self.truncation_bound,
            'weight_cutoff': self.weight_cutoff,
            'n_paths': self.n_paths,
        }


def convolved_flip_distribution(masks, noise, n_records):
    '''
    Distribution of flip masks over all fault paths, built one location at a
    time: F <- (1 - eps_k) F + sum_P p_P F(. ^ mask_P).
    '''
    records = np.arange(n_records)
    dist = np.zeros(n_records)
    dist[0] = 1.0
    for k in sorted(masks):
        new = (1 - noise.eps(k))*dist
        for _, prob, mask in masks[k]:
            new += prob*dist[records ^ mask]
        dist = new
    return dist


def _enumerate_paths(options, r, start, stop, base):
    # Terms per flip mask for paths of weight r over combinations[start:stop]
    terms = dict()
    count = 0
    combos = itertools.islice(itertools.combinations(range(len(options)), r), start, stop)
    for combo in combos:
        for choice in itertools.product(*[options[i] for i in combo]):
            weight = base
            mask = 0
            for ratio, m in choice:
                weight *= ratio
                mask ^= m
            terms.setdefault(mask, []).append(weight)
            count += 1
    return terms, count


def truncation_remainder(eps, cutoff):
    '''sum_{r > cutoff} C(S, r) eps_max^r (1 - eps_min)^(S - r)'''
    S = len(eps)
    if S == 0 or cutoff >= S:
        return 0.0
    e_max, e_min = max(eps), min(eps)
    return math.fsum(math.comb(S, r)*e_max**r*(1 - e_min)**(S - r) for r in range(cutoff + 1, S + 1))


def enumerated_flip_distribution(masks, noise, n_records, cutoff, workers=None, max_paths=MAX_PATHS):
    '''
    Flip-mask distribution from the explicit paths of weight <= cutoff.
    Terms are summed with math.fsum, so the result is independent of the
    worker count.
    '''
    workers = workers or default_workers()
    locations = sorted(masks)
    options = [[(prob/(1 - noise.eps(k)), mask) for _, prob, mask in masks[k]] for k in locations]
    n_max = elementary_symmetric([len(o) for o in options])[:cutoff + 1].sum()
    if n_max > max_paths:
        raise ResourceLimitError(f'{int(n_max)} paths up to weight {cutoff} exceed the limit of {max_paths}')
    base = math.exp(math.fsum(math.log1p(-noise.eps(k)) for k in locations))

    tasks = []
    for r in range(min(cutoff, len(locations)) + 1):
        n_combos = math.comb(len(locations), r)
        start = 0
        for size in split_evenly(n_combos, max(1, min(workers, n_combos))):
            tasks.append((r, start, start + size))
            start += size

    if workers == 1:
        results = [_enumerate_paths(options, r, a, b, base) for r, a, b in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_enumerate_paths, [options]*len(tasks),
                                        *zip(*tasks), [base]*len(tasks)))

    terms = dict()
    n_paths = 0
    for shard_terms, count in results:
        n_paths += count
        for mask, values in shard_terms.items():
            terms.setdefault(mask, []).extend(values)
    dist = np.zeros(n_records)
    for mask, values in terms.items():
        dist[mask] = math.fsum(values)
    return dist, n_paths


def _distributions_from_records(ports, ideal_records, noisy_records):
    ideal_xy = ports.xy_distribution(ideal_records)
    ideal = {ports.xy_key(i): float(p) for i, p in enumerate(ideal_xy) if p > 0}

    joint = dict()
    for record in np.flatnonzero(noisy_records):
        key = ports.joint_key(record)
        joint[key] = joint.get(key, 0.0) + float(noisy_records[record])

    z0 = ports.values['z'] == 0
    q_z0 = math.fsum(noisy_records[z0])
    if q_z0 > 0:
        cond_xy = ports.xy_distribution(np.where(z0, noisy_records, 0.0))/q_z0
        conditional = {ports.xy_key(i): float(p) for i, p in enumerate(cond_xy) if p > 0}
        delta = math.fsum(np.abs(cond_xy - ideal_xy))
    else:
        logger.warning('no run passes postselection; conditional distribution is undefined')
        conditional, delta = None, None
    return ideal, joint, conditional, q_z0, delta


def exact_distributions(circuit, noise, weight_cutoff=None, workers=None):
    '''
    Exact noisy distributions by summing over fault paths.

    With weight_cutoff=None every path is included (the flip distribution is
    built by XOR convolution over locations). With a cutoff only paths with
    at most that many faults are enumerated and the weight of the rest is
    bounded by truncation_bound.
    '''
    if weight_cutoff is not None and weight_cutoff < 0:
        raise DomainError(f'weight_cutoff must be nonnegative, {weight_cutoff = }')
    ideal_records = ideal_record_distribution(circuit)
    sparse = SparseTest(circuit, ideal_records)
    ports = sparse.ports
    masks = fault_flip_masks(circuit, noise)

    with RunTimer(f'exact_distributions cutoff={weight_cutoff}'):
        if weight_cutoff is None:
            flips = convolved_flip_distribution(masks, noise, ports.n_records)
            n_paths, bound = None, None
        else:
            flips, n_paths = enumerated_flip_distribution(masks, noise, ports.n_records, weight_cutoff, workers)
            bound = truncation_remainder([noise.eps(k) for k in sorted(masks)], weight_cutoff)

    noisy_records = _xor_convolve(flips, ideal_records)
    ideal, joint, conditional, q_z0, delta = _distributions_from_records(ports, ideal_records, noisy_records)
    sparse_mass = math.fsum(flips[f] for f in np.flatnonzero(flips) if sparse(int(f)))

    return SimReport(ideal, joint, conditional, q_z0, delta, sparse_mass,
                     math.fsum(flips), bound, weight_cutoff, n_paths)


########################################################################
# Direct Monte Carlo
########################################################################

@dataclass
class SampleReport:
    joint: dict
    conditional: dict
    q_z0: float
    delta: float
    shots: int
    seed: int

    def stderr(self, p):
        return math.sqrt(p*(1 - p)/self.shots)

    def to_dict(self):
        return {'joint': self.joint, 'conditional': self.conditional, 'q_z0': self.q_z0,
                'delta': self.delta, 'shots': self.shots, 'seed': self.seed}


_STIM_NAMES = {'prep_z': 'R', 'prep_x': 'RX', 'i': 'I', 'h': 'H', 's': 'S', 'cnot': 'CX', 'cz': 'CZ',
               'meas_z': 'M', 'meas_x': 'MX'}


def _stim_noise(circuit, pauli_probs, loc):
    probs = dict(pauli_probs)
    if not probs:
        return
    if len(loc.qubits) == 1:
        circuit.append_operation('PAULI_CHANNEL_1', list(loc.qubits), [probs.get(p, 0.0) for p in 'XYZ'])
    else:
        circuit.append_operation('PAULI_CHANNEL_2', list(loc.qubits), [probs.get(p, 0.0) for p in TWO_QUBIT_PAULIS])


def to_stim_circuit(circuit, noise):
    '''
    The noisy circuit as a stim.Circuit: each location's Pauli channel follows
    it, except on measurements where it comes first. Measurement j of the
    stim record is measurement ordinal j.
    '''
    noise.check(circuit)
    out = stim.Circuit()
    for k, loc in enumerate(circuit.locations):
        try:
            name = _STIM_NAMES[loc.kind]
        except KeyError:
            raise UnsupportedCircuitError(f'location {k}: {loc.kind} cannot be sampled by the stabilizer simulator')
        channel = [(p, prob) for p, prob in noise.channels.get(k, ()) if prob > 0]
        if loc.is_measurement:
            _stim_noise(out, channel, loc)
            out.append_operation(name, list(loc.qubits))
        else:
            out.append_operation(name, list(loc.qubits))
            _stim_noise(out, channel, loc)
    return out


def sample_distributions(circuit, noise, shots, seed=DEFAULT_SEED):
    '''
    Monte Carlo estimate of the same quantities as exact_distributions, from
    shots of the noisy circuit on the stim stabilizer simulator. Only delta
    uses the exact ideal distribution as its reference.
    '''
    if shots < 1:
        raise DomainError(f'shots must be at least 1, {shots = }')
    stim_circuit = to_stim_circuit(circuit, noise)
    ports = PortMap(circuit)

    with RunTimer(f'sample_distributions shots={shots}'):
        sampler = stim_circuit.compile_sampler(seed=seed)
        bits = sampler.sample(shots=shots)
        records = (bits.astype(np.int64) << np.arange(circuit.n_measurements, dtype=np.int64)).sum(axis=1)

    counts = np.bincount(records, minlength=ports.n_records)
    ideal_records = ideal_record_distribution(circuit)
    _, joint, conditional, q_z0, delta = _distributions_from_records(ports, ideal_records, counts/shots)
    return SampleReport(joint, conditional, q_z0, delta, shots, seed)


########################################################################
# Sparse set and the postselected threshold check
########################################################################

def _paths_of_weight(masks, r):
    # (FaultPath, flip mask) for every path with exactly r faults, in a fixed order
    locations = sorted(masks)
    for combo in itertools.combinations(locations, r):
        for choice in itertools.product(*[masks[k] for k in combo]):
            mask = 0
            for _, _, m in choice:
                mask ^= m
            yield FaultPath(tuple((k, pauli) for k, (pauli, _, _) in zip(combo, choice))), mask


def find_unsparse_path(circuit, noise, max_weight, sparse=None):
    '''Lowest-weight path with at most max_weight faults that is not sparse, or None.'''
    sparse = sparse or SparseTest(circuit)
    masks = fault_flip_masks(circuit, noise)
    for r in range(1, max_weight + 1):
        for path, mask in _paths_of_weight(masks, r):
            if not sparse(mask):
                return path
    return None


def minimal_sparse_weight(circuit, noise, max_weight=3):
    '''
    Largest w such that every path with fewer than w faults is sparse,
    searched up to max_weight faults (returns max_weight + 1 if all are).
    '''
    path = find_unsparse_path(circuit, noise, max_weight)
    w = max_weight + 1 if path is None else path.order
    logger.info(f'minimal sparse weight of {circuit.name or "circuit"}: {w}')
    return w


@dataclass
class Theorem1Report:
    passed: bool
    precondition_ok: bool
    offending_path: list
    w: int
    delta: float
    delta_bound: float
    q_z0: float
    q_z0_bound: float
    report: SimReport = field(repr=False, default=None)

    @property
    def delta_slack(self):
        return None if self.delta is None else self.delta_bound - self.delta

    @property
    def q_z0_slack(self):
        return self.q_z0 - self.q_z0_bound

    def to_dict(self):
        return {
            'passed': self.passed,
            'precondition_ok': self.precondition_ok,
            'offending_path': self.offending_path,
            'w': self.w,
            'delta': self.delta,
            'delta_bound': self.delta_bound,
            'delta_slack': self.delta_slack,
            'q_z0': self.q_z0,
            'q_z0_bound': self.q_z0_bound,
            'q_z0_slack': self.q_z0_slack,
        }


def verify_theorem1(circuit, noise, spec, weight_cutoff=None):
    '''
    Check the postselected error bound and the postselection probability
    bound on one circuit. The faulty set is "w or more faults"; every path
    with fewer faults must be sparse, which is checked exhaustively first.
    '''
    if not isinstance(spec, FaultySetSpec):
        spec = FaultySetSpec(int(spec))
    sparse = SparseTest(circuit)
    offending = find_unsparse_path(circuit, noise, spec.w - 1, sparse)
    if offending is not None:
        logger.warning(f'path {offending.as_list()} with {offending.order} fault(s) is not sparse')

    profile = GateNoiseProfile(noise.eps_list(circuit), stochastic=True)
    delta_bound = postselected_error_bound(profile, spec).value
    q_z0_bound = postselection_prob_lower_bound(profile)

    report = exact_distributions(circuit, noise, weight_cutoff)
    delta_ok = report.delta is not None and report.delta <= delta_bound + TOLERANCE
    q_ok = report.q_z0 >= q_z0_bound - TOLERANCE

    return Theorem1Report(
        passed=(offending is None) and delta_ok and q_ok,
        precondition_ok=offending is None,
        offending_path=None if offending is None else offending.as_list(),
        w=spec.w,
        delta=report.delta,
        delta_bound=delta_bound,
        q_z0=report.q_z0,
        q_z0_bound=q_z0_bound,
        report=report,
    )
