import logging
from dataclasses import dataclass, field

from ..errors import UnsupportedCircuitError

logger = logging.getLogger(__name__)

PORTS = ('x', 'y', 'z')
PORT_TAGS = PORTS + ('-',)

SINGLE_QUBIT_GATES = ('h', 's', 'i', 't')
TWO_QUBIT_GATES = ('cnot', 'cz')
PREPARATIONS = ('prep_z', 'prep_x')
MEASUREMENTS = ('meas_z', 'meas_x')
LOCATION_KINDS = PREPARATIONS + SINGLE_QUBIT_GATES + TWO_QUBIT_GATES + MEASUREMENTS


@dataclass(frozen=True)
class Location:
    kind: str
    qubits: tuple
    port: str = None

    @property
    def is_measurement(self):
        return self.kind in MEASUREMENTS

    @property
    def is_preparation(self):
        return self.kind in PREPARATIONS

    def to_line(self):
        words = [self.kind] + [str(q) for q in self.qubits]
        if self.is_measurement:
            words.append(self.port)
        return ' '.join(words)


@dataclass(frozen=True)
class ParityCheck:
    '''Noiseless classical XOR of measurement outcomes fed to a port.'''
    port: str
    measurements: tuple

    def to_line(self):
        return ' '.join(['parity', self.port] + [str(m) for m in self.measurements])


@dataclass
class CliffordCircuit:
    '''
    A small circuit of noisy locations followed by noiseless classical parity
    checks.

    Parameters
    ----------
    n_qubits : int
        Qubits start in |0>; a preparation may only be the first location
        acting on its qubit.
    locations : list of Location
        Preparations, gates and measurements in time order. Every
        measurement carries a port tag: x (output), y (postselection
        register), z (syndrome) or - (used only by parity checks).
    parities : list of ParityCheck
        Classical checks over measurement ordinals (the j-th measurement in
        the list has ordinal j).
    '''
    n_qubits: int
    locations: list = field(default_factory=list)
    parities: list = field(default_factory=list)
    name: str = None

    def __post_init__(self):
        self.locations = list(self.locations)
        self.parities = list(self.parities)
        self.validate()

    def validate(self):
        if self.n_qubits < 1:
            raise UnsupportedCircuitError(f'circuit needs at least one qubit, n_qubits = {self.n_qubits}')
        touched = set()
        measured = set()
        for i, loc in enumerate(self.locations):
            if loc.kind not in LOCATION_KINDS:
                raise UnsupportedCircuitError(f'location {i}: unknown kind {loc.kind!r}')
            expected = 2 if loc.kind in TWO_QUBIT_GATES else 1
            if len(loc.qubits) != expected:
                raise UnsupportedCircuitError(f'location {i}: {loc.kind} acts on {expected} qubit(s), got {loc.qubits}')
            if len(set(loc.qubits)) != len(loc.qubits):
                raise UnsupportedCircuitError(f'location {i}: repeated qubit in {loc.qubits}')
            for q in loc.qubits:
                if not (0 <= q < self.n_qubits):
                    raise UnsupportedCircuitError(f'location {i}: qubit {q} out of range')
                if q in measured:
                    raise UnsupportedCircuitError(f'location {i}: qubit {q} used after its measurement')
            if loc.is_preparation and loc.qubits[0] in touched:
                raise UnsupportedCircuitError(f'location {i}: preparation of qubit {loc.qubits[0]} that is already in use')
            if loc.is_measurement:
                if loc.port not in PORT_TAGS:
                    raise UnsupportedCircuitError(f'location {i}: unknown port tag {loc.port!r}')
                measured.add(loc.qubits[0])
            touched.update(loc.qubits)

        n_meas = self.n_measurements
        for check in self.parities:
            if check.port not in PORTS:
                raise UnsupportedCircuitError(f'parity check feeds unknown port {check.port!r}')
            if not check.measurements:
                raise UnsupportedCircuitError('parity check over no measurements')
            for m in check.measurements:
                if not (0 <= m < n_meas):
                    raise UnsupportedCircuitError(f'parity check refers to measurement {m}, circuit has {n_meas}')

    @property
    def measurements(self):
        return [loc for loc in self.locations if loc.is_measurement]

    @property
    def n_measurements(self):
        return len(self.measurements)

    @property
    def n_locations(self):
        return len(self.locations)

    @property
    def has_syndrome(self):
        return self.port_widths()['z'] > 0

    def port_widths(self):
        widths = {port: 0 for port in PORTS}
        for loc in self.measurements:
            if loc.port in widths:
                widths[loc.port] += 1
        for check in self.parities:
            widths[check.port] += 1
        return widths

    def port_sources(self):
        '''
        For every port, the measurement-ordinal sets whose parity gives each
        bit: direct measurements first, then parity checks, in file order.
        '''
        sources = {port: [] for port in PORTS}
        for j, loc in enumerate(self.measurements):
            if loc.port in sources:
                sources[loc.port].append((j,))
        for check in self.parities:
            sources[check.port].append(tuple(check.measurements))
        return sources

    def port_masks(self):
        # Each port bit as an integer mask over measurement ordinals
        return {port: [sum(1 << j for j in src) for src in srcs]
                for port, srcs in self.port_sources().items()}

    def ports_of_record(self, record):
        '''(x, y, z) bit strings of a measurement record given as an integer.'''
        masks = self.port_masks()
        return tuple(''.join(str(bin(record & m).count('1') & 1) for m in masks[port]) for port in PORTS)

    def to_netlist(self):
        lines = [f'qubits {self.n_qubits}']
        lines.extend(loc.to_line() for loc in self.locations)
        lines.extend(check.to_line() for check in self.parities)
        return '\n'.join(lines) + '\n'


def parse_netlist(text, name=None):
    '''
    Read a circuit from the plain-text netlist format, one location per line:

        qubits 3
        prep_z 0
        cnot 0 1
        meas_z 1 z
        parity x 0 1

    '#' starts a comment.
    '''
    n_qubits = None
    locations = []
    parities = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        words = line.split('#', 1)[0].split()
        if not words:
            continue
        kind, args = words[0].lower(), words[1:]
        try:
            if kind == 'qubits':
                n_qubits = int(args[0])
            elif kind == 'parity':
                parities.append(ParityCheck(args[0], tuple(int(a) for a in args[1:])))
            elif kind in MEASUREMENTS:
                if len(args) != 2:
                    raise UnsupportedCircuitError(f'line {line_number}: {kind} needs a qubit and a port tag')
                locations.append(Location(kind, (int(args[0]),), args[1]))
            elif kind in LOCATION_KINDS:
                locations.append(Location(kind, tuple(int(a) for a in args)))
            else:
                raise UnsupportedCircuitError(f'line {line_number}: unknown location kind {kind!r}')
        except UnsupportedCircuitError:
            raise
        except (IndexError, ValueError) as e:
            raise UnsupportedCircuitError(f'line {line_number}: cannot parse {line.strip()!r}') from e

    if n_qubits is None:
        raise UnsupportedCircuitError('netlist has no "qubits" line')
    circuit = CliffordCircuit(n_qubits, locations, parities, name=name)
    logger.debug(f'parsed circuit {name} with {circuit.n_locations} locations')
    return circuit


def read_netlist(path):
    with open(path) as f:
        return parse_netlist(f.read(), name=str(path))
