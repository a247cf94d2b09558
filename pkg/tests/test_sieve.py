"""
Tests for the complement sieve.
"""

from fractions import Fraction

import numpy as np
import pytest

from src.core.arith import odd_primes_below
from src.engines.density import density_interval
from src.engines.membership import g_mod, is_member
from src.engines.sieve import (
    ComplementSieve,
    complement_sieve,
    cross_validate,
    empirical_density,
    least_element,
)


def _marked(flags):
    return [2 * i + 1 for i in np.flatnonzero(~flags)]


class TestComplementSieve:
    def test_small_bound(self):
        flags = complement_sieve(40)
        assert len(flags) == 20
        assert _marked(flags) == [9, 21, 25, 33]
        assert all(g_mod(n) != 0 for n in _marked(flags))

    def test_nothing_marked_below_nine(self):
        flags = complement_sieve(8)
        assert flags.all() and len(flags) == 4

    def test_segments_do_not_change_the_result(self):
        whole = ComplementSieve().members(100_000)
        assert np.array_equal(ComplementSieve(segment_size=7).members(100_000), whole)
        assert np.array_equal(ComplementSieve(segment_size=4096).members(100_000), whole)

    def test_workers_match_serial(self):
        serial = ComplementSieve(segment_size=4096).count(200_001)
        assert ComplementSieve(segment_size=4096, jobs=2).count(200_001) == serial

    def test_agrees_with_characterization(self):
        flags = complement_sieve(100_000)
        for n in range(1, 100_001, 2):
            assert flags[(n - 1) // 2] == is_member(n).member, n

    def test_checkpoints(self):
        sieve = ComplementSieve(segment_size=1024)
        frame = sieve.checkpoints([1000, 100, 5000])
        assert list(frame.columns) == ["N", "member_count", "density"]
        assert list(frame["N"]) == [100, 1000, 5000]
        assert list(frame["member_count"]) == [sieve.count(100), sieve.count(1000), sieve.count(5000)]

    def test_rejects_small_bound(self):
        with pytest.raises(ValueError):
            complement_sieve(2)


class TestEmpiricalDensity:
    def test_tiny_bound(self):
        result = empirical_density(8)
        assert result.member_count == 4
        assert result.marked_complement_count == 0
        assert result.density == Fraction(1, 2)
        assert result.decimal_density == "0.500000"
        assert empirical_density(8, digits=2).decimal_density == "0.50"

    def test_matches_brute_force(self):
        expected = sum(is_member(n).member for n in range(1, 1001, 2))
        assert empirical_density(1000).member_count == expected

    @pytest.mark.slow
    def test_density_approaches_the_exact_interval(self):
        # Distance from the rigorous interval, not from a rounded point value.
        report = density_interval(Fraction("0.00082"))
        distances = []
        for limit in (10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7):
            density = empirical_density(limit).density
            distances.append(max(report.lower - density, density - report.upper, Fraction(0)))
        assert distances == sorted(distances, reverse=True)


class TestLeastElement:
    def test_least_element_is_p_squared(self):
        for p in odd_primes_below(314):
            p = int(p)
            assert least_element(p) == p * p

    def test_nothing_below_limit(self):
        assert least_element(5, limit=24) is None


class TestCrossValidate:
    @pytest.mark.parametrize("limit", [3, 100, 10_000])
    def test_no_mismatches(self, limit):
        report = cross_validate(limit)
        assert report.ok
        assert report.checked == (limit + 1) // 2
        assert report.oracle_limit == min(limit, 10_000)

    def test_rejects_large_limit(self):
        with pytest.raises(ValueError):
            cross_validate(100_001)
