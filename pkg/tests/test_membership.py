"""
Tests for the membership engine: oracle, characterization, rules and classifier.
"""

import math

import pytest

from src.core.arith import factorize, odd_primes_below
from src.core.exceptions import EvenInputError, FactorizationTimeout
from src.core.state import EngineSettings, Factorization, Method, RuleTag, Verdict
from src.engines.membership import (
    Classifier,
    classify,
    fermat_exponent,
    g_mod,
    is_fermat_prime,
    is_member,
    is_member_power,
    rule_cofactor,
    rule_fermat_form,
    rule_gcd_parity,
    rule_mod4,
    rule_prime_power,
    unit_power_sum,
)


def _odd_prime_powers(bound):
    for p in odd_primes_below(bound + 1):
        p = int(p)
        q, k = p, 1
        while q <= bound:
            yield p, k, q
            q *= p
            k += 1


class TestOracle:
    def test_small_values(self):
        assert g_mod(1) == 0
        assert g_mod(7) == 0
        assert g_mod(9) == 6
        assert g_mod(15) == 0

    def test_matches_naive_sum(self):
        for n in range(1, 200, 2):
            naive = sum(pow(j, (n - 1) // 2, n) for j in range(1, n)) % n
            assert g_mod(n) == naive

    def test_unit_power_sum(self):
        assert unit_power_sum(7, 1) == 0
        assert unit_power_sum(9, 6) == 6


class TestIsMember:
    @pytest.mark.parametrize(
        "n, member, witness",
        [
            (1, True, None),
            (3, True, None),
            (9, False, 3),
            (25, False, 5),
            (33, False, 3),
            (65, False, 5),
            (85, True, None),
            (2021, True, None),
            (2021 ** 2, True, None),
        ],
    )
    def test_instances(self, n, member, witness):
        verdict = is_member(n)
        assert verdict.member is member
        assert verdict.witness_prime == witness

    def test_even_input_rejected(self):
        with pytest.raises(EvenInputError):
            is_member(10)

    def test_uses_given_factorization(self):
        f = factorize(2021)
        assert is_member(2021, factorization=f).member
        with pytest.raises(ValueError):
            is_member(2023, factorization=f)

    def test_witness_is_smallest_violating_prime(self):
        # 105: half = 52 is divisible by 2 and 4 but not by 6.
        verdict = is_member(105)
        assert not verdict.member
        assert verdict.witness_prime == 3

    @pytest.mark.slow
    def test_oracle_equivalence(self):
        for n in range(3, 10_000, 2):
            assert is_member(n).member == (g_mod(n) == 0), n

    def test_every_odd_prime_is_member(self):
        for p in odd_primes_below(10_001):
            verdict = is_member(int(p))
            assert verdict.member and verdict.witness_prime is None

    def test_three_mod_four_is_member(self):
        for n in range(3, 100_001, 4):
            assert is_member(n).member, n


class TestPrimePowers:
    def test_half_gcd_identity(self):
        for p in odd_primes_below(51):
            p = int(p)
            for k in range(1, 7):
                expected = p - 1 if k % 2 == 0 else (p - 1) // 2
                assert math.gcd((p ** k - 1) // 2, p - 1) == expected

    def test_even_power_residue(self):
        for p, k, q in _odd_prime_powers(100_000):
            if k % 2 == 0:
                assert g_mod(q) == (p - 1) * p ** (k - 1), q

    def test_membership_iff_odd_exponent(self):
        for p, k, q in _odd_prime_powers(100_000):
            assert is_member(q).member is (k % 2 == 1)

    def test_unit_sum_vanishes(self):
        for p, _, q in _odd_prime_powers(2000):
            for exponent in range(1, 51):
                if math.gcd(exponent, p - 1) < p - 1:
                    assert unit_power_sum(q, exponent) == 0, (q, exponent)

    def test_powers_of_non_members_stay_non_members(self):
        for n in range(3, 201, 2):
            if is_member(n).member:
                continue
            f = factorize(n)
            for k in (2, 3, 5):
                assert not is_member_power(f, k).member, (n, k)


class TestRules:
    def test_mod4(self):
        assert rule_mod4(7) is Verdict.MEMBER
        assert rule_mod4(9) is None
        with pytest.raises(EvenInputError):
            rule_mod4(4)

    def test_prime_power(self):
        assert rule_prime_power(factorize(27)) is Verdict.MEMBER
        assert rule_prime_power(factorize(81)) is Verdict.NON_MEMBER
        assert rule_prime_power(factorize(15)) is None

    def test_gcd_parity(self):
        assert rule_gcd_parity(7, factorize(7)) is Verdict.MEMBER
        assert rule_gcd_parity(9, factorize(9)) is None

    def test_cofactor(self):
        assert rule_cofactor(factorize(2021)) is Verdict.MEMBER
        assert rule_cofactor(factorize(7)) is None

    def test_fermat_primes(self):
        assert [is_fermat_prime(a) for a in range(5)] == [True] * 5
        assert is_fermat_prime(5) is False
        assert is_fermat_prime(20) is False
        assert is_fermat_prime(33) is None

    def test_fermat_form(self):
        assert fermat_exponent(2 ** 96 + 1) == 96
        assert fermat_exponent(15) is None
        assert rule_fermat_form(96) is Verdict.MEMBER
        assert rule_fermat_form(6) is Verdict.NON_MEMBER  # 65 = 5 * 13
        assert rule_fermat_form(64) is None

    @pytest.mark.slow
    def test_rules_agree_with_characterization(self):
        for n in range(3, 100_001, 2):
            f = factorize(n)
            member = is_member(n, f).member
            verdicts = [rule_mod4(n), rule_prime_power(f), rule_gcd_parity(n, f), rule_cofactor(f)]
            m = fermat_exponent(n)
            if m is not None:
                verdicts.append(rule_fermat_form(m))
            for verdict in verdicts:
                if verdict is not None:
                    assert (verdict is Verdict.MEMBER) == member, n


class TestClassifier:
    def test_trivial_one(self):
        record = classify(1)
        assert record.member and record.trivial
        assert record.witness_prime is None

    def test_small_prime_rules(self):
        record = classify(7)
        assert record.rules_fired == [
            RuleTag.MOD4,
            RuleTag.PRIME_POWER,
            RuleTag.GCD_PHI_ODD,
            RuleTag.GCD_LAMBDA_ODD,
        ]
        assert record.method is Method.THEOREM1

    def test_non_member_records(self):
        record = classify(9)
        assert not record.member
        assert record.witness_prime == 3
        assert record.rules_fired == [RuleTag.PRIME_POWER, RuleTag.FERMAT_FORM]

        record = classify(2021)
        assert record.member
        assert record.rules_fired == [RuleTag.COFACTOR]

    def test_fermat_form_without_factoring(self):
        record = classify(2 ** 96 + 1)
        assert record.member
        assert record.method is Method.FERMAT_FORM
        assert RuleTag.FERMAT_FORM in record.rules_fired

    def test_large_non_member_fermat_form(self):
        # m = 2^2 * 33, so F_2 = 17 divides 2^m + 1.
        record = classify((1 << 132) + 1)
        assert not record.member
        assert record.witness_prime == 17

    def test_oracle_flag(self):
        record = classify(9, oracle=True)
        assert record.method is Method.ORACLE
        assert record.oracle_residue == 6
        with pytest.raises(ValueError):
            classify(1_000_003, oracle=True)

    def test_even_rejected(self):
        with pytest.raises(EvenInputError):
            classify(2022)

    def test_timeout_without_fallback(self):
        n = (2 ** 31 - 1) * (2 ** 61 - 1)
        # n = 1 (mod 4) and not of Fermat form, so nothing cheap can decide it.
        assert n % 4 == 1
        with pytest.raises(FactorizationTimeout):
            classify(n, settings=EngineSettings(factor_timeout=1e-9))

    def test_timeout_falls_back_to_mod4(self):
        n = 1_000_000_009 * (2 ** 61 - 1)
        assert n % 4 == 3
        record = classify(n, settings=EngineSettings(factor_timeout=1e-9, cheap_bits=256))
        assert record.member
        assert record.method is Method.MOD4

    def test_range_is_ordered(self):
        classifier = Classifier()
        records = list(classifier.classify_range(3, 15))
        assert [r.n for r in records] == [3, 5, 7, 9, 11, 13, 15]
        assert [r.member for r in records] == [True, True, True, False, True, True, True]

    def test_range_with_workers_matches_serial(self):
        classifier = Classifier(EngineSettings(jobs=2))
        parallel = list(classifier.classify_range(1, 20_001))
        serial = list(classifier.classify_range(1, 20_001, jobs=1))
        assert parallel == serial

    def test_given_factorization_is_checked(self):
        with pytest.raises(ValueError):
            classify(27, factorization=Factorization.from_pairs([(3, 2)]))
