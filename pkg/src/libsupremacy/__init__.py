__version__ = '0.1.0'

from .errors import DomainError, DivergenceError, InputDataError, UnsupportedCircuitError, \
    ResourceLimitError, SolverError
from .utils import find_limit_point_in_list, interpolate_list, log_binomial, elementary_symmetric, RunTimer
from .goal_seek import ThresholdResult, GoalSeekMonotonic, bisect_root, interpolated_crossing
from .noise_model import CircuitNoiseParams, EdgeErrorModel, LocationIncidence, leading_order_edge_model, \
    odd_parity_combination, all_order_edge_model, sample_location_model, edge_model_frame, \
    leading_order_coefficients, DEFAULT_SEED
from .bounds import GateNoiseProfile, FaultySetSpec, BoundReport, binomial_tail, standard_error_bound, \
    postselected_error_bound, postselection_prob_lower_bound, kappa_budget, kappa_inequality, \
    coherent_noise_norm_bound
from .concatenation import ConcatenationScheme, level_map_correction, level_map_detection, \
    threshold_estimate, supremacy_gain, iterate_levels, faulty_norm_bound
from .saw import SawTable, SingularCountTable, ChainWeightParams, count_saws, naive_count_saws, \
    verify_saw_bound, topological_tail, singular_tail, chain_weight_exact, chain_weight_bound, \
    critical_singular_ratio
from .surface_threshold import CriticalConstants, effective_epsilon, phenomenological_thresholds, \
    circuit_threshold, msd_margin, fig2_sweep, sweep_crossing, supremacy_summary
from .postsel import CliffordCircuit, StochasticPauliNoise, load_circuit, exact_distributions, \
    sample_distributions, minimal_sparse_weight, verify_theorem1
