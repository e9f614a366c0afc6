from ..errors import DomainError
from .circuit import parse_netlist

# Built-in validation circuits in netlist form.
#
# baseline: one qubit, one wait location, output read directly. No syndrome,
#   so postselection always succeeds.
# parity: data qubit copied onto an ancilla by a CNOT; the ancilla is the
#   syndrome and the data qubit the output.
# d2patch: distance-2 surface code on data qubits 0-3 (Z checks Z0Z1, Z2Z3,
#   X check X0X1X2X3, logical Z0Z2). The logical |0> is encoded, one round of
#   stabilizer readout runs on ancillas 4-6, and the data qubits are read
#   out. Final data parities repeat the Z checks and give the logical
#   output. The X check visits the data in the order 0, 2, 1, 3 so a single
#   ancilla fault never leaves an undetected logical X.
BUILTIN_NETLISTS = {
    'baseline': '''
qubits 1
prep_z 0
i 0
meas_z 0 x
''',

    'parity': '''
qubits 2
prep_z 0
prep_z 1
cnot 0 1
meas_z 1 z
meas_z 0 x
''',

    'd2patch': '''
qubits 7
# encode logical |0> = (|0000> + |1111>)/sqrt(2)
prep_x 0
prep_z 1
prep_z 2
prep_z 3
cnot 0 1
cnot 0 2
cnot 0 3
# Z0Z1 check
prep_z 4
cnot 0 4
cnot 1 4
meas_z 4 z
# Z2Z3 check
prep_z 5
cnot 2 5
cnot 3 5
meas_z 5 z
# X0X1X2X3 check
prep_x 6
cnot 6 0
cnot 6 2
cnot 6 1
cnot 6 3
meas_x 6 z
# data readout, measurement ordinals 3-6
meas_z 0 -
meas_z 1 -
meas_z 2 -
meas_z 3 -
parity z 3 4
parity z 5 6
parity x 3 5
''',
}


def builtin_names():
    return list(BUILTIN_NETLISTS)


def load_circuit(name):
    try:
        text = BUILTIN_NETLISTS[name]
    except KeyError:
        raise DomainError(f'Unknown built-in circuit: {name}') from None
    return parse_netlist(text, name=name)
