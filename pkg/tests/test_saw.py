import math

import numpy as np
import pytest

from libsupremacy.errors import DivergenceError, DomainError, InputDataError, ResourceLimitError
from libsupremacy.saw import SawTable, SingularCountTable, ChainWeightParams, count_saws, naive_count_saws, \
    verify_saw_bound, topological_tail, singular_tail, chain_weight_exact, chain_weight_bound, odds
from libsupremacy.surface_threshold import effective_epsilon

# Published self-avoiding walk counts on the simple cubic lattice
KNOWN_COUNTS = [1, 6, 30, 150, 726, 3534, 16926, 81390, 387966, 1853886, 8809878, 41934150,
                198842742, 943974510]


@pytest.fixture(scope='module')
def known_table():
    return SawTable(dict(enumerate(KNOWN_COUNTS)))


class TestCountSaws:

    @pytest.mark.parametrize('l_max', [1, 2, 3, 4, 6])
    def test_matches_published_counts(self, l_max):
        table = count_saws(l_max, workers=1)
        assert [table[l] for l in range(l_max + 1)] == KNOWN_COUNTS[:l_max + 1]

    def test_matches_naive_enumerator(self):
        assert count_saws(6, workers=1).counts == naive_count_saws(6).counts

    @pytest.mark.slow
    def test_matches_naive_enumerator_to_length_eight(self):
        assert count_saws(8, workers=1).counts == naive_count_saws(8).counts

    def test_worker_count_does_not_change_counts(self):
        assert count_saws(6, workers=2).counts == count_saws(6, workers=1).counts

    @pytest.mark.slow
    def test_counts_to_length_twelve(self):
        table = count_saws(12)
        assert [table[l] for l in range(13)] == KNOWN_COUNTS[:13]
        assert verify_saw_bound(table).passed

    def test_above_ceiling_raises(self):
        with pytest.raises(ResourceLimitError):
            count_saws(15)
        with pytest.raises(ResourceLimitError):
            naive_count_saws(11)

    def test_zero_length_raises(self):
        with pytest.raises(DomainError):
            count_saws(0)


class TestSawTable:

    def test_first_counts_are_fixed(self):
        with pytest.raises(DomainError):
            SawTable({0: 1, 1: 5})
        with pytest.raises(DomainError):
            SawTable({0: 2, 1: 6})

    def test_csv(self, tmp_path, known_table):
        path = tmp_path / 'saw.csv'
        known_table.to_csv(path)
        assert path.read_text().splitlines()[:3] == ['l,count', '0,1', '1,6']
        assert SawTable.from_csv(path).counts == known_table.counts

    def test_csv_missing_column_raises(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('length,count\n1,2\n')
        with pytest.raises(InputDataError, match='missing columns'):
            SingularCountTable.from_csv(path)


class TestVerifySawBound:

    def test_published_counts_pass(self, known_table):
        report = verify_saw_bound(known_table)
        assert report.passed
        assert report.violations == []
        assert report.max_ratio == pytest.approx(1.0)
        assert report.ratios[4] == pytest.approx(726/750)

    def test_equality_at_short_lengths(self, known_table):
        report = verify_saw_bound(known_table)
        assert report.ratios[1] == pytest.approx(1.0)
        assert report.ratios[2] == pytest.approx(1.0)
        assert report.ratios[3] == pytest.approx(1.0)
        assert all(report.ratios[l] < 1 for l in range(4, 14))

    def test_enumerated_table_with_zero_length_passes(self):
        table = count_saws(4, workers=1)
        assert 0 in table
        report = verify_saw_bound(table)
        assert report.passed
        assert report.violations == []

    def test_growth_ratio_violation_is_reported(self):
        # 5*130 < 6*125 but 130 > 5*25
        report = verify_saw_bound(SawTable({0: 1, 1: 6, 2: 25, 3: 130}))
        assert report.violations == [3]

    def test_violation_is_reported(self):
        report = verify_saw_bound(SawTable({0: 1, 1: 6, 2: 31}))
        assert not report.passed
        assert report.violations == [2]


class TestTopologicalTail:

    def test_zero_noise(self, known_table):
        assert topological_tail(0.0, 5, table=known_table).bound == 0.0

    @pytest.mark.parametrize('eps', [0.2, 0.5, 1.0])
    def test_divergent_regime_raises(self, eps, known_table):
        with pytest.raises(DivergenceError, match='1/5'):
            topological_tail(eps, 5, table=known_table)

    def test_longer_table_tightens_bound(self, known_table):
        short = SawTable(dict(enumerate(KNOWN_COUNTS[:13])))
        eps, d = 0.05, 5
        a = topological_tail(eps, d, table=short)
        b = topological_tail(eps, d, table=known_table)
        assert b.bound <= a.bound
        assert b.partial >= a.partial
        assert abs(b.bound - a.bound) <= a.remainder

    def test_partial_sum_and_remainder(self, known_table):
        eps, d = 0.05, 5
        x = odds(eps)
        tail = topological_tail(eps, d, table=known_table)
        assert tail.partial == pytest.approx(math.fsum(KNOWN_COUNTS[l]*x**l for l in range(d, 14)), rel=1e-12)
        assert tail.remainder == pytest.approx(1.2*(5*x)**14/(1 - 5*x), rel=1e-12)
        assert tail.bound == pytest.approx(tail.partial + tail.remainder)

    def test_poly_factor_scales(self, known_table):
        base = topological_tail(0.1, 3, table=known_table).bound
        assert topological_tail(0.1, 3, poly_factor=100.0, table=known_table).bound == pytest.approx(100*base)

    def test_distance_beyond_table_uses_geometric_remainder(self, known_table):
        tail = topological_tail(0.1, 20, table=known_table)
        assert tail.partial == 0.0
        r = 5*odds(0.1)
        assert tail.bound == pytest.approx(1.2*r**20/(1 - r))

    def test_increasing_in_eps(self, known_table):
        values = [topological_tail(e, 5, table=known_table).bound for e in np.linspace(0.01, 0.16, 16)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_decreasing_in_distance(self, known_table):
        values = [topological_tail(0.1, d, table=known_table).bound for d in range(1, 20)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_gap_in_table_raises(self):
        with pytest.raises(InputDataError):
            topological_tail(0.05, 2, table=SawTable({0: 1, 1: 6, 3: 150}))


class TestSingularTail:

    def test_two_lengths(self):
        table = SingularCountTable({1: 2, 2: 10})
        assert singular_tail(0.1, 2, table) == pytest.approx(2/9 + 10/81, rel=1e-12)
        assert singular_tail(0.1, 2, table) == pytest.approx(0.34568, abs=1e-5)

    def test_zero_counts(self):
        assert singular_tail(0.1, 3, SingularCountTable({1: 0, 2: 0, 3: 0})) == 0.0

    def test_missing_length_raises(self):
        with pytest.raises(InputDataError, match='missing'):
            singular_tail(0.1, 3, SingularCountTable({1: 2, 2: 10}))

    def test_eps_one_raises(self):
        with pytest.raises(DomainError):
            singular_tail(1.0, 2, SingularCountTable({1: 2, 2: 10}))

    def test_read_from_csv(self, tmp_path):
        path = tmp_path / 'singular.csv'
        path.write_text('# short logical errors\nl,count\n1,2\n2,10\n')
        assert SingularCountTable.from_csv(path).counts == {1: 2, 2: 10}


class TestChainWeights:

    def test_length_two(self):
        params = ChainWeightParams(0.1, 0.05)
        assert chain_weight_exact(2, params) == pytest.approx(0.024042, abs=1e-6)

    def test_no_correlated_errors(self):
        params = ChainWeightParams(0.1, 0.0)
        for l in range(1, 8):
            assert chain_weight_exact(l, params) == pytest.approx(odds(0.1)**l, rel=1e-12)

    def test_no_single_errors(self):
        assert chain_weight_exact(3, ChainWeightParams(0.0, 0.05)) == 0.0

    @pytest.mark.parametrize('nu, mu', [(0.01, 0.005), (0.1, 0.05), (0.09, 0.03), (0.2, 0.2)])
    @pytest.mark.parametrize('l', [1, 2, 5, 10, 20])
    def test_sum_equals_closed_form(self, l, nu, mu):
        params = ChainWeightParams(nu, mu)
        assert chain_weight_exact(l, params) == pytest.approx(chain_weight_bound(l, params), rel=1e-12)

    @pytest.mark.parametrize('l', [1, 2, 3, 8, 13])
    def test_bounded_by_effective_epsilon_power(self, l):
        params = ChainWeightParams(0.09, 0.03)
        assert chain_weight_bound(l, params) <= effective_epsilon(0.09, 0.03)**l*(1 + 1e-12)

    def test_invalid_rates_raise(self):
        with pytest.raises(DomainError):
            ChainWeightParams(1.0, 0.1)
