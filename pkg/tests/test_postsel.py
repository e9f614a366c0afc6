import itertools
import math

import pytest

from libsupremacy.errors import DomainError, UnsupportedCircuitError
from libsupremacy.noise_model import CircuitNoiseParams
from libsupremacy.postsel import StochasticPauliNoise, FaultPath, parse_netlist, \
    read_netlist, load_circuit, builtin_names, propagate_path, path_flip_mask, ideal_record_distribution, \
    exact_distributions, sample_distributions, to_stim_circuit, minimal_sparse_weight, find_unsparse_path, \
    verify_theorem1
from libsupremacy.postsel import frames
from libsupremacy.postsel.simulate import truncation_remainder


@pytest.fixture
def parity_circuit():
    return load_circuit('parity')


@pytest.fixture
def patch():
    return load_circuit('d2patch')


def all_paths(circuit, noise):
    options = [[None] + [p for p, _ in noise.channels.get(k, ())] for k in range(circuit.n_locations)]
    for choice in itertools.product(*options):
        yield FaultPath(tuple((k, p) for k, p in enumerate(choice) if p is not None))


class TestNetlist:

    def test_builtin_names(self):
        assert builtin_names() == ['baseline', 'parity', 'd2patch']

    def test_unknown_builtin_raises(self):
        with pytest.raises(DomainError):
            load_circuit('steane')

    def test_port_widths(self, patch, parity_circuit):
        assert patch.port_widths() == {'x': 1, 'y': 0, 'z': 5}
        assert parity_circuit.port_widths() == {'x': 1, 'y': 0, 'z': 1}
        assert not load_circuit('baseline').has_syndrome

    def test_netlist_text_reproduces_circuit(self, patch):
        again = parse_netlist(patch.to_netlist())
        assert again.locations == patch.locations
        assert again.parities == patch.parities

    def test_read_netlist_file(self, tmp_path):
        path = tmp_path / 'bell.txt'
        path.write_text('qubits 2\nprep_x 0\nprep_z 1\ncnot 0 1\nmeas_z 0 x  # output\nmeas_z 1 x\n')
        circuit = read_netlist(path)
        assert circuit.n_qubits == 2
        assert circuit.n_measurements == 2
        assert circuit.name == str(path)

    def test_ports_of_record(self, parity_circuit):
        # measurement 0 is the ancilla (syndrome), measurement 1 the output
        assert parity_circuit.ports_of_record(0b01) == ('0', '', '1')
        assert parity_circuit.ports_of_record(0b10) == ('1', '', '0')

    @pytest.mark.parametrize('text, message', [
        ('prep_z 0\nmeas_z 0 x\n', 'no "qubits" line'),
        ('qubits 1\nfoo 0\n', 'unknown location kind'),
        ('qubits 1\nprep_z 0\nmeas_z 0 q\n', 'unknown port tag'),
        ('qubits 1\nmeas_z 0 x\nh 0\n', 'used after its measurement'),
        ('qubits 1\nh 0\nprep_z 0\n', 'already in use'),
        ('qubits 2\nprep_z 0\nmeas_z 0 x\nparity z 0 3\n', 'refers to measurement 3'),
        ('qubits 2\ncnot 0\n', 'acts on 2 qubit'),
        ('qubits 1\nh a\n', 'cannot parse'),
    ])
    def test_invalid_netlist_raises(self, text, message):
        with pytest.raises(UnsupportedCircuitError, match=message):
            parse_netlist(text)


class TestNoise:

    def test_identity_pauli_raises(self):
        with pytest.raises(DomainError):
            StochasticPauliNoise({0: [('II', 0.1)]})

    def test_total_probability_must_be_below_one(self):
        with pytest.raises(DomainError):
            StochasticPauliNoise({0: [('X', 0.6), ('Z', 0.4)]})

    def test_support_mismatch_raises(self, parity_circuit):
        with pytest.raises(DomainError):
            StochasticPauliNoise({2: [('X', 0.1)]}).check(parity_circuit)

    def test_depolarizing_rates(self, parity_circuit):
        params = CircuitNoiseParams(p1=0.01, p2=0.03, pp=0.002, pm=0.004)
        noise = StochasticPauliNoise.depolarizing(parity_circuit, params)
        assert noise.eps_list(parity_circuit) == pytest.approx([0.002, 0.002, 0.03, 0.004, 0.004])
        assert len(noise.channels[2]) == 15

    def test_iid_xz_rates(self, patch):
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        assert noise.eps_list(patch) == pytest.approx([0.01]*patch.n_locations)


class TestPropagation:

    def test_no_faults(self, parity_circuit):
        assert propagate_path(parity_circuit, FaultPath()) == (0, 0)

    @pytest.mark.parametrize('faults, flips', [
        (((0, 'X'),), (1, 1)),   # X on the control spreads to the ancilla
        (((1, 'X'),), (1, 0)),
        (((2, 'ZI'),), (0, 0)),
        (((2, 'IX'),), (1, 0)),
        (((2, 'XI'),), (0, 1)),
        (((3, 'X'),), (1, 0)),
        (((4, 'X'),), (0, 1)),
        (((4, 'Z'),), (0, 0)),
    ])
    def test_parity_circuit_flips(self, parity_circuit, faults, flips):
        assert propagate_path(parity_circuit, FaultPath(faults)) == flips

    def test_hadamard_swaps_x_and_z(self):
        circuit = parse_netlist('qubits 1\nprep_z 0\nh 0\nmeas_z 0 x\n')
        assert propagate_path(circuit, FaultPath(((0, 'X'),))) == (0,)
        assert propagate_path(circuit, FaultPath(((0, 'Z'),))) == (1,)

    def test_phase_gate_maps_x_to_y(self):
        circuit = parse_netlist('qubits 1\nprep_x 0\ns 0\nmeas_x 0 x\n')
        assert propagate_path(circuit, FaultPath(((0, 'X'),))) == (1,)
        assert propagate_path(circuit, FaultPath(((1, 'X'),))) == (0,)

    def test_controlled_z_copies_x_as_z(self):
        circuit = parse_netlist('qubits 2\nprep_z 0\nprep_x 1\ncz 0 1\nmeas_z 0 x\nmeas_x 1 z\n')
        assert propagate_path(circuit, FaultPath(((0, 'X'),))) == (1, 1)
        assert propagate_path(circuit, FaultPath(((1, 'X'),))) == (0, 0)

    def test_flips_are_linear(self, patch):
        a = FaultPath(((4, 'XI'),))
        b = FaultPath(((17, 'IX'),))
        both = FaultPath(((4, 'XI'), (17, 'IX')))
        assert path_flip_mask(patch, both) == path_flip_mask(patch, a) ^ path_flip_mask(patch, b)

    def test_non_clifford_gate_raises(self):
        circuit = parse_netlist('qubits 1\nprep_z 0\nt 0\nmeas_z 0 x\n')
        with pytest.raises(UnsupportedCircuitError):
            propagate_path(circuit, FaultPath(((0, 'X'),)))

    def test_repeated_location_raises(self):
        with pytest.raises(DomainError):
            FaultPath(((1, 'X'), (1, 'Z')))

    def test_path_weights_sum_to_one(self):
        circuit = load_circuit('baseline')
        noise = StochasticPauliNoise.iid_xz(circuit, 0.1)
        total = math.fsum(path.weight(noise) for path in all_paths(circuit, noise))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestIdealDistribution:

    def test_patch_output_is_deterministic(self, patch):
        probs = ideal_record_distribution(patch)
        assert probs.sum() == pytest.approx(1.0)
        # data qubits read 0000 or 1111 with equal probability, all checks trivial
        assert probs[0] == pytest.approx(0.5)
        assert probs[0b1111000] == pytest.approx(0.5)

    def test_noiseless_report(self, patch):
        report = exact_distributions(patch, StochasticPauliNoise.iid_xz(patch, 0.0))
        assert report.ideal == pytest.approx({'0|': 1.0})
        assert report.conditional == pytest.approx({'0|': 1.0})
        assert report.q_z0 == pytest.approx(1.0)
        assert report.delta == pytest.approx(0.0, abs=1e-15)

    def test_random_syndrome_is_rejected(self):
        circuit = parse_netlist('qubits 1\nprep_x 0\nmeas_z 0 z\n')
        with pytest.raises(UnsupportedCircuitError, match='not deterministically trivial'):
            exact_distributions(circuit, StochasticPauliNoise())


class TestExactDistributions:

    def test_baseline_wait_error(self):
        circuit = load_circuit('baseline')
        report = exact_distributions(circuit, StochasticPauliNoise({1: [('X', 0.1)]}))
        assert report.conditional == pytest.approx({'0|': 0.9, '1|': 0.1})
        assert report.joint == pytest.approx({'0||': 0.9, '1||': 0.1})
        assert report.q_z0 == pytest.approx(1.0)
        assert report.delta == pytest.approx(0.2)

    def test_parity_circuit_rejects_spread_errors(self, parity_circuit):
        p, r = 0.05, 0.02
        noise = StochasticPauliNoise({0: [('X', p)], 4: [('X', r)]})
        report = exact_distributions(parity_circuit, noise)
        assert report.q_z0 == pytest.approx(1 - p, rel=1e-12)
        assert report.conditional['1|'] == pytest.approx(r, rel=1e-12)
        assert report.delta == pytest.approx(2*r, rel=1e-12)

    def test_delta_grows_with_noise(self, parity_circuit):
        deltas = [exact_distributions(parity_circuit, StochasticPauliNoise.iid_xz(parity_circuit, e)).delta
                  for e in (0.001, 0.01, 0.05, 0.1)]
        assert all(b > a for a, b in zip(deltas, deltas[1:]))

    def test_cutoff_covering_every_path_matches_convolution(self):
        circuit = load_circuit('baseline')
        noise = StochasticPauliNoise.iid_xz(circuit, 0.1)
        full = exact_distributions(circuit, noise)
        cut = exact_distributions(circuit, noise, weight_cutoff=3)
        assert cut.covered_mass == pytest.approx(1.0, abs=1e-12)
        assert cut.truncation_bound == 0.0
        assert cut.joint == pytest.approx(full.joint, abs=1e-12)
        assert cut.n_paths == 27

    def test_truncation_bound_covers_missing_mass(self, parity_circuit):
        noise = StochasticPauliNoise.iid_xz(parity_circuit, 0.05)
        report = exact_distributions(parity_circuit, noise, weight_cutoff=1)
        assert 1 - report.covered_mass <= report.truncation_bound + 1e-12
        assert report.truncation_bound == pytest.approx(truncation_remainder([0.05]*5, 1))

    def test_worker_count_does_not_change_result(self, patch):
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        one = exact_distributions(patch, noise, weight_cutoff=2, workers=1)
        two = exact_distributions(patch, noise, weight_cutoff=2, workers=2)
        assert one.joint == two.joint
        assert one.n_paths == two.n_paths

    def test_negative_cutoff_raises(self, parity_circuit):
        with pytest.raises(DomainError):
            exact_distributions(parity_circuit, StochasticPauliNoise(), weight_cutoff=-1)


class TestSampledDistributions:

    def test_matches_exact(self, patch):
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        exact = exact_distributions(patch, noise)
        sampled = sample_distributions(patch, noise, 200000, seed=3)
        assert abs(sampled.q_z0 - exact.q_z0) <= 4*sampled.stderr(exact.q_z0)
        p_wrong = exact.joint.get('1||00000', 0.0)
        assert abs(sampled.joint.get('1||00000', 0.0) - p_wrong) <= 4*sampled.stderr(p_wrong) + 1e-5

    def test_same_seed_same_result(self, parity_circuit):
        noise = StochasticPauliNoise.iid_xz(parity_circuit, 0.05)
        a = sample_distributions(parity_circuit, noise, 5000, seed=9)
        b = sample_distributions(parity_circuit, noise, 5000, seed=9)
        assert a.joint == b.joint

    def test_stim_circuit_layout(self, patch):
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        stim_circuit = to_stim_circuit(patch, noise)
        assert stim_circuit.num_measurements == patch.n_measurements
        assert stim_circuit.num_qubits == patch.n_qubits
        text = str(stim_circuit)
        assert text.count('PAULI_CHANNEL_2') == 11
        assert 'MX 6' in text

    def test_noiseless_patch_samples_ideal_records(self, patch):
        report = sample_distributions(patch, StochasticPauliNoise(), 2000, seed=1)
        assert report.joint == pytest.approx({'0||00000': 1.0})
        assert report.q_z0 == pytest.approx(1.0)
        assert report.conditional == pytest.approx({'0|': 1.0})
        assert report.delta == pytest.approx(0.0, abs=1e-12)

    def test_non_clifford_gate_cannot_be_sampled(self):
        circuit = parse_netlist('qubits 1\nprep_z 0\nt 0\nmeas_z 0 x\n')
        with pytest.raises(UnsupportedCircuitError):
            sample_distributions(circuit, StochasticPauliNoise(), 10)

    def test_sampler_does_not_share_frame_propagation(self, patch, monkeypatch):
        # A wrong CNOT rule for Z frames must move the exact result but not the sampled one
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        exact = exact_distributions(patch, noise)
        original = frames._apply_gate

        def wrong_cnot(kind, qubits, fx, fz):
            if kind == 'cnot':
                c, t = qubits
                fx[..., t] ^= fx[..., c]
                fz[..., t] ^= fz[..., c]
            else:
                original(kind, qubits, fx, fz)

        monkeypatch.setattr(frames, '_apply_gate', wrong_cnot)
        broken = exact_distributions(patch, noise)
        sampled = sample_distributions(patch, noise, 100000, seed=5)
        sigma = sampled.stderr(exact.q_z0)
        assert abs(broken.q_z0 - exact.q_z0) > 10*sigma
        assert abs(sampled.q_z0 - exact.q_z0) <= 4*sigma
        assert abs(sampled.q_z0 - broken.q_z0) > 4*sigma


class TestSparseWeight:

    def test_unprotected_circuits(self, parity_circuit):
        assert minimal_sparse_weight(load_circuit('baseline'), StochasticPauliNoise.iid_xz(
            load_circuit('baseline'), 0.01)) == 1
        assert minimal_sparse_weight(parity_circuit, StochasticPauliNoise.iid_xz(parity_circuit, 0.01)) == 1

    def test_patch_detects_every_single_fault(self, patch):
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        assert find_unsparse_path(patch, noise, 1) is None
        assert minimal_sparse_weight(patch, noise) == 2


class TestPostselectedBoundOnCircuits:

    @pytest.mark.parametrize('name', ['baseline', 'parity', 'd2patch'])
    @pytest.mark.parametrize('eps', [1e-3, 1e-2])
    def test_iid_noise(self, name, eps):
        circuit = load_circuit(name)
        noise = StochasticPauliNoise.iid_xz(circuit, eps)
        result = verify_theorem1(circuit, noise, minimal_sparse_weight(circuit, noise))
        assert result.passed
        assert result.delta <= result.delta_bound
        assert result.q_z0_slack >= -1e-12

    @pytest.mark.parametrize('name', ['parity', 'd2patch'])
    def test_depolarizing_noise(self, name):
        circuit = load_circuit(name)
        noise = StochasticPauliNoise.depolarizing(circuit, CircuitNoiseParams.uniform(0.005))
        result = verify_theorem1(circuit, noise, minimal_sparse_weight(circuit, noise))
        assert result.passed

    def test_overstated_weight_fails_precondition(self, patch):
        noise = StochasticPauliNoise.iid_xz(patch, 0.01)
        result = verify_theorem1(patch, noise, 3)
        assert not result.precondition_ok
        assert not result.passed
        assert len(result.offending_path) == 2

    def test_report_dict(self, parity_circuit):
        noise = StochasticPauliNoise.iid_xz(parity_circuit, 0.01)
        d = verify_theorem1(parity_circuit, noise, 1).to_dict()
        assert d['w'] == 1
        assert d['delta_slack'] == pytest.approx(d['delta_bound'] - d['delta'])
