from .circuit import Location, ParityCheck, CliffordCircuit, parse_netlist, read_netlist
from .noise import StochasticPauliNoise, pauli_bits
from .frames import FaultPath, propagate_path, path_flip_mask, fault_flip_masks
from .simulate import ideal_record_distribution, exact_distributions, sample_distributions, \
    to_stim_circuit, minimal_sparse_weight, find_unsparse_path, verify_theorem1, SimReport, SampleReport, \
    Theorem1Report
from .library import BUILTIN_NETLISTS, builtin_names, load_circuit
