"""
Tests for the density engine.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from src.core.arith import add, compare, negate, odd_primes, odd_primes_below
from src.core.exceptions import TruncationError
from src.core.state import Progression
from src.engines.density import (
    CompatibilityGraph,
    density_interval,
    in_M,
    intersect_progressions,
    prime_tail_bounds,
    progression_for_prime,
    series_partial_sum,
    truncation_index,
    union_density,
)


def _in_class(n, p):
    return n % p == 0 and ((n - 1) // 2) % (p - 1) == 0


def _brute_union_density(primes):
    """Density of the union of F_p, counted over one full period."""
    period = math.lcm(*(2 * p * (p - 1) for p in primes))
    n = np.arange(period, dtype=np.int64)
    covered = np.zeros(period, dtype=bool)
    for p in primes:
        covered |= n % (2 * p * (p - 1)) == p * p
    return Fraction(int(covered.sum()), period)


class TestProgressions:
    def test_single_prime(self):
        assert progression_for_prime(3) == Progression(residue=9, modulus=12)
        assert progression_for_prime(5) == Progression(residue=25, modulus=40)
        assert progression_for_prime(7).density == Fraction(1, 84)

    def test_rejects_non_primes(self):
        for bad in (1, 2, 9):
            with pytest.raises(ValueError):
                progression_for_prime(bad)

    def test_membership_in_class(self):
        f3 = progression_for_prime(3)
        assert [n for n in range(1, 40) if n in f3] == [9, 21, 33]

    def test_intersections(self):
        assert intersect_progressions([3]) == Progression(residue=9, modulus=12)
        assert intersect_progressions([5, 3]) == Progression(residue=105, modulus=120)
        assert intersect_progressions([3, 7]) is None

    def test_intersection_rejects_bad_sets(self):
        with pytest.raises(ValueError):
            intersect_progressions([])
        with pytest.raises(ValueError):
            intersect_progressions([3, 3])

    def test_in_M(self):
        assert in_M(15)
        assert in_M(3)
        assert not in_M(1)
        assert not in_M(2)
        assert not in_M(9)
        assert not in_M(21)

    def test_pairs_follow_compatibility(self):
        primes = [int(p) for p in odd_primes_below(200)]
        for p, q in itertools.combinations(primes, 2):
            nonempty = intersect_progressions([p, q]) is not None
            assert nonempty == in_M(p * q) == ((q - 1) % p != 0 and (p - 1) % q != 0)

    def test_pairwise_compatibility_is_sufficient(self):
        primes = odd_primes(8)
        for size in range(1, len(primes) + 1):
            for subset in itertools.combinations(primes, size):
                pairwise = all(
                    CompatibilityGraph.compatible(p, q) for p, q in itertools.combinations(subset, 2)
                )
                assert (intersect_progressions(subset) is not None) == pairwise

    @pytest.mark.parametrize("subset", [(3,), (3, 5), (5, 7), (3, 5, 17), (5, 7, 17)])
    def test_intersection_by_brute_force(self, subset):
        progression = intersect_progressions(subset)
        r, modulus = progression.residue, progression.modulus
        for n in range(r, 10 * modulus + 1, modulus):
            assert n > 0 and all(_in_class(n, p) for p in subset)
        assert [n for n in range(1, modulus + 1, 2) if all(_in_class(n, p) for p in subset)] == [r]


class TestCompatibilityGraph:
    def test_small_graph(self):
        graph = CompatibilityGraph.from_primes([7, 3, 5])
        assert graph.vertices == (3, 5, 7)
        assert graph.neighbors(3) == (5,)
        assert graph.neighbors(7) == (5,)
        assert list(graph.cliques()) == [(3,), (3, 5), (5,), (5, 7), (7,)]
        assert graph.clique_count() == 5

    def test_rejects_composites(self):
        with pytest.raises(ValueError):
            CompatibilityGraph([3, 9])

    def test_cliques_are_cliques(self):
        graph = CompatibilityGraph(odd_primes(15))
        cliques = list(graph.cliques())
        assert len(cliques) == graph.clique_count()
        assert len(set(cliques)) == len(cliques)
        assert all(graph.is_clique(c) for c in cliques)
        assert all(in_M(math.prod(c)) for c in cliques)


class TestUnionDensity:
    def test_small_values(self):
        assert union_density(1) == 0
        assert union_density(2) == Fraction(1, 12)
        assert union_density(3) == Fraction(1, 10)
        assert union_density(4) == Fraction(31, 280)

    @pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
    def test_matches_period_count(self, k):
        assert union_density(k) == _brute_union_density(odd_primes(k - 1))

    def test_monotone_and_bounded(self):
        previous = Fraction(0)
        singles = Fraction(0)
        for k in range(1, 16):
            value = union_density(k)
            assert previous <= value <= singles
            assert 0 <= value <= Fraction(1, 2)
            if k < 15:
                p = odd_primes(k)[-1]
                singles += Fraction(1, 2 * p * (p - 1))
            previous = value

    def test_workers_match_serial(self):
        assert union_density(12, jobs=2) == union_density(12)

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError):
            union_density(0)


class TestSeries:
    def test_small_values(self):
        assert series_partial_sum(3) == Fraction(1, 2)
        assert series_partial_sum(7) == Fraction(2, 5)

    def test_matches_union(self):
        for k in range(1, 13):
            assert series_partial_sum(odd_primes(k)[-1]) == Fraction(1, 2) - union_density(k)

    def test_rejects_bad_bound(self):
        with pytest.raises(ValueError):
            series_partial_sum(1)


class TestTruncation:
    def test_tail_bounds_bracket_finite_sum(self):
        lower, upper = prime_tail_bounds(1, 100)
        exact = sum(Fraction(1, 2 * int(p) * (int(p) - 1)) for p in odd_primes_below(100))
        assert lower <= exact <= upper - Fraction(1, 198)

    def test_tail_bounds_shrink_with_cutoff(self):
        lo_small, hi_small = prime_tail_bounds(3, 1000)
        lo_large, hi_large = prime_tail_bounds(3, 100_000)
        assert lo_small <= lo_large <= hi_large <= hi_small

    def test_small_epsilons(self):
        assert truncation_index(Fraction(1, 5)) == 1
        assert truncation_index(Fraction(1, 10)) == 2

    def test_gives_up_at_max_cutoff(self):
        with pytest.raises(TruncationError):
            truncation_index(Fraction(1, 10), cutoff=8, max_cutoff=8)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            truncation_index(Fraction(0))

    def test_interval_for_coarse_epsilon(self):
        report = density_interval(Fraction(1, 10))
        assert report.k == 2
        assert report.upper == Fraction(5, 12)
        assert report.lower == Fraction(19, 60)
        assert (report.decimal_lower, report.decimal_upper) == ("0.316666", "0.416667")

    def test_interval_with_empty_union(self):
        report = density_interval(Fraction(1, 2))
        assert report.k == 1
        assert report.primes_used == []
        assert report.union_density == 0
        assert report.clique_count == 0
        assert (report.lower, report.upper) == (Fraction(0), Fraction(1, 2))
        assert (report.decimal_lower, report.decimal_upper) == ("0.000000", "0.500000")

    def test_interval_for_one_percent(self):
        epsilon = Fraction(1, 100)
        report = density_interval(epsilon)
        assert report.k == 6
        assert report.primes_used == odd_primes(5)
        assert add(report.upper, negate(report.lower)) == epsilon
        assert compare(report.lower, Fraction("0.3798")) < 0 < compare(report.upper, Fraction("0.3798"))
        assert (report.decimal_lower, report.decimal_upper) == ("0.374324", "0.384325")
