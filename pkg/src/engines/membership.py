"""
Membership engine: decides whether an odd n satisfies
    sum_{j=1}^{n-1} j^((n-1)/2) = 0 (mod n)
by brute force (the oracle) and by the prime-factor characterization, and exposes
each sufficient-condition rule on its own.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.arith import (
    carmichael_lambda,
    euler_phi,
    factorize,
    two_adic,
)
from ..core.exceptions import EvenInputError, FactorizationTimeout, OracleMismatchError
from ..core.state import (
    ClassificationRecord,
    EngineSettings,
    Factorization,
    MembershipVerdict,
    Method,
    RuleTag,
    Verdict,
)

ORACLE_LIMIT = 10 ** 6
_NUMPY_MODULUS_LIMIT = 1 << 31
_CHUNK = 1 << 20
# Fermat numbers F_5 .. F_32 have all been proven composite.
_KNOWN_COMPOSITE_FERMAT = range(5, 33)
_PEPIN_LIMIT = 12


def _power_sum(n: int, exponent: int, units_only: bool = False) -> int:
    """sum of j^exponent mod n over 1 <= j < n (only gcd(j, n) = 1 when units_only)."""
    if n == 1:
        return 0
    if n >= _NUMPY_MODULUS_LIMIT:
        return sum(
            pow(j, exponent, n)
            for j in range(1, n)
            if not units_only or math.gcd(j, n) == 1
        ) % n

    # Vectorized square-and-multiply; every product stays below n^2 < 2^62.
    total = 0
    for start in range(1, n, _CHUNK):
        base = np.arange(start, min(start + _CHUNK, n), dtype=np.int64)
        if units_only:
            base = base[np.gcd(base, n) == 1]
        result = np.ones_like(base)
        e = exponent
        while e:
            if e & 1:
                result = result * base % n
            e >>= 1
            if e:
                base = base * base % n
        total = (total + int(result.sum() % n)) % n
    return total


def g_mod(n: int) -> int:
    """
    G(n) mod n where G(n) = sum_{j=1}^{n-1} j^floor((n-1)/2).

    One modular power per term; intended as an oracle for n up to about 10^6.

    Args:
        n: Integer >= 1

    Returns:
        Residue in [0, n); n = 1 gives 0 (empty sum)
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _power_sum(n, (n - 1) // 2)


def unit_power_sum(modulus: int, exponent: int) -> int:
    """sum of j^exponent over units j of Z/modulus, reduced mod modulus."""
    if modulus < 1 or exponent < 0:
        raise ValueError("modulus must be >= 1 and exponent >= 0")
    return _power_sum(modulus, exponent, units_only=True)


def _require_odd(n: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2 == 0:
        raise EvenInputError(n)


def _checked_factorization(n: int, f: Optional[Factorization], **factor_options) -> Factorization:
    if f is None:
        return factorize(n, **factor_options)
    if f.value != n:
        raise ValueError(f"factorization is of {f.value}, not {n}")
    return f


def is_member(
    n: int,
    factorization: Optional[Factorization] = None,
    timeout: Optional[float] = 10.0,
    trial_limit: int = 1_000_000,
) -> MembershipVerdict:
    """
    Characterization test: n is a member iff (p-1) does not divide (n-1)/2
    for every prime p | n.

    Args:
        n: Odd integer >= 1
        factorization: Known factorization of n, skips factoring
        timeout: Factorization budget in seconds
        trial_limit: Trial division bound

    Returns:
        MembershipVerdict; non-members carry the smallest violating prime

    Raises:
        EvenInputError: n is even
        FactorizationTimeout: n could not be factored in time
    """
    _require_odd(n)
    if n == 1:
        return MembershipVerdict(member=True)
    f = _checked_factorization(n, factorization, timeout=timeout, trial_limit=trial_limit)
    half = (n - 1) // 2
    for p in f.primes:
        if half % (p - 1) == 0:
            return MembershipVerdict(member=False, witness_prime=p)
    return MembershipVerdict(member=True)


def is_member_power(f: Factorization, k: int) -> MembershipVerdict:
    """Membership of n^k computed from the factorization of n."""
    return is_member(f.value ** k, f.power(k))


def rule_mod4(n: int) -> Optional[Verdict]:
    """n = 3 (mod 4) forces membership."""
    _require_odd(n)
    return Verdict.MEMBER if n % 4 == 3 else None


def rule_prime_power(f: Factorization) -> Optional[Verdict]:
    """p^k is a member iff k is odd; no verdict for other shapes."""
    if not f.is_prime_power:
        return None
    p, k = f.factors[0]
    if p == 2:
        raise EvenInputError(f.value)
    return Verdict.MEMBER if k % 2 else Verdict.NON_MEMBER


def _gcd_parity_tags(n: int, f: Factorization) -> List[RuleTag]:
    if n < 3:
        return []
    half = (n - 1) // 2
    tags = []
    if math.gcd(half, euler_phi(f)) % 2:
        tags.append(RuleTag.GCD_PHI_ODD)
    if math.gcd(half, carmichael_lambda(f)) % 2:
        tags.append(RuleTag.GCD_LAMBDA_ODD)
    return tags


def rule_gcd_parity(n: int, f: Factorization) -> Optional[Verdict]:
    """Member if gcd((n-1)/2, phi(n)) or gcd((n-1)/2, lambda(n)) is odd."""
    _require_odd(n)
    f = _checked_factorization(n, f)
    return Verdict.MEMBER if _gcd_parity_tags(n, f) else None


def rule_cofactor(f: Factorization) -> Optional[Verdict]:
    """Member if (p-1) does not divide n/p^r - 1 for every p^r || n."""
    n = f.value
    if n < 3:
        return None
    _require_odd(n)
    for p, r in f.factors:
        if (n // p ** r - 1) % (p - 1) == 0:
            return None
    return Verdict.MEMBER


@lru_cache(maxsize=64)
def is_fermat_prime(alpha: int) -> Optional[bool]:
    """
    Whether 2^(2^alpha) + 1 is prime.

    Pepin's test for alpha <= 12, the known composites F_5..F_32 above that,
    None when the answer is out of reach.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return True
    if alpha <= _PEPIN_LIMIT:
        fermat = (1 << (1 << alpha)) + 1
        return pow(3, (fermat - 1) // 2, fermat) == fermat - 1
    if alpha in _KNOWN_COMPOSITE_FERMAT:
        return False
    return None


def rule_fermat_form(m: int) -> Optional[Verdict]:
    """
    Verdict for n = 2^m + 1 without factoring n.

    With m = 2^alpha * m1, m1 odd and > 1, n is a member unless 2^(2^alpha) + 1
    is prime. No verdict when m is a power of two.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    alpha, m1 = two_adic(m)
    if m1 == 1:
        return None
    prime = is_fermat_prime(alpha)
    if prime is None:
        return None
    return Verdict.NON_MEMBER if prime else Verdict.MEMBER


def fermat_exponent(n: int) -> Optional[int]:
    """m if n = 2^m + 1 with m >= 1, else None."""
    d = n - 1
    if d < 2 or d & (d - 1):
        return None
    return d.bit_length() - 1


class Classifier:
    """
    Runs every membership rule on an odd integer and settles the final verdict.
    Cheap congruence rules run before anything that needs a factorization.
    """

    def __init__(self, settings: Optional[EngineSettings] = None):
        self.settings = settings or EngineSettings()

    def classify(
        self,
        n: int,
        factorization: Optional[Factorization] = None,
        oracle: bool = False,
    ) -> ClassificationRecord:
        """
        Classify an odd integer.

        Args:
            n: Odd integer >= 1
            factorization: Known factorization of n
            oracle: Also compute G(n) mod n and insist it agrees (n <= 10^6)

        Returns:
            ClassificationRecord with the verdict and every rule that fired

        Raises:
            EvenInputError: n is even
            FactorizationTimeout: factoring timed out and no cheap rule decided
            OracleMismatchError: oracle and characterization disagree
        """
        _require_odd(n)
        if oracle and n > ORACLE_LIMIT:
            raise ValueError(f"the oracle is limited to n <= {ORACLE_LIMIT}")
        if n == 1:
            return ClassificationRecord(
                n=1,
                member=True,
                trivial=True,
                method=Method.ORACLE if oracle else Method.THEOREM1,
                oracle_residue=0 if oracle else None,
            )

        fired: List[Tuple[RuleTag, Verdict]] = []
        self._run_congruence_rules(n, fired)

        large = n.bit_length() > self.settings.cheap_bits
        if factorization is None and large and fired:
            logger.debug(f"Deciding a {n.bit_length()}-bit input by congruence rules")
            return self._congruence_record(n, fired)
        try:
            f = _checked_factorization(
                n,
                factorization,
                timeout=self.settings.factor_timeout,
                trial_limit=self.settings.trial_limit,
                rounds=self.settings.mr_rounds,
            )
        except FactorizationTimeout:
            if fired:
                logger.warning(f"Factorization timed out; falling back to {fired[0][0].value}")
                return self._congruence_record(n, fired)
            raise

        verdict = is_member(n, f)
        self._run_factor_rules(n, f, fired)
        self._check_rules_agree(n, verdict.member, fired)

        method = Method.THEOREM1
        residue = None
        if oracle:
            residue = g_mod(n)
            if (residue == 0) != verdict.member:
                raise OracleMismatchError(n, residue, verdict.member)
            method = Method.ORACLE

        return ClassificationRecord(
            n=n,
            member=verdict.member,
            witness_prime=verdict.witness_prime,
            rules_fired=[tag for tag, _ in fired],
            method=method,
            oracle_residue=residue,
        )

    def _run_congruence_rules(self, n: int, fired: List[Tuple[RuleTag, Verdict]]) -> None:
        if rule_mod4(n):
            fired.append((RuleTag.MOD4, Verdict.MEMBER))
        m = fermat_exponent(n)
        if m is not None:
            verdict = rule_fermat_form(m)
            if verdict is not None:
                fired.append((RuleTag.FERMAT_FORM, verdict))

    def _run_factor_rules(self, n: int, f: Factorization, fired: List[Tuple[RuleTag, Verdict]]) -> None:
        verdict = rule_prime_power(f)
        if verdict is not None:
            fired.append((RuleTag.PRIME_POWER, verdict))
        for tag in _gcd_parity_tags(n, f):
            fired.append((tag, Verdict.MEMBER))
        if rule_cofactor(f):
            fired.append((RuleTag.COFACTOR, Verdict.MEMBER))

    def _check_rules_agree(self, n: int, member: bool, fired: List[Tuple[RuleTag, Verdict]]) -> None:
        expected = Verdict.MEMBER if member else Verdict.NON_MEMBER
        for tag, verdict in fired:
            if verdict is not expected:
                raise RuntimeError(f"rule {tag.value} says {verdict.value} for n={n}, characterization disagrees")

    def _congruence_record(self, n: int, fired: List[Tuple[RuleTag, Verdict]]) -> ClassificationRecord:
        verdicts = dict(fired)
        fermat = verdicts.get(RuleTag.FERMAT_FORM)
        if fermat is not None:
            witness = None
            if fermat is Verdict.NON_MEMBER:
                # Any violating prime of 2^m + 1 is the Fermat prime 2^(2^alpha) + 1.
                alpha, _ = two_adic(fermat_exponent(n))
                witness = (1 << (1 << alpha)) + 1
            return ClassificationRecord(
                n=n,
                member=fermat is Verdict.MEMBER,
                witness_prime=witness,
                rules_fired=list(verdicts),
                method=Method.FERMAT_FORM,
            )
        return ClassificationRecord(n=n, member=True, rules_fired=list(verdicts), method=Method.MOD4)

    def classify_range(self, lo: int, hi: int, jobs: Optional[int] = None) -> Iterator[ClassificationRecord]:
        """
        Classify every odd n in [lo, hi], in increasing order.

        Args:
            lo: Lower bound >= 1
            hi: Upper bound >= lo
            jobs: Worker processes (defaults to settings.jobs)
        """
        if lo < 1 or hi < lo:
            raise ValueError("need 1 <= lo <= hi")
        jobs = jobs or self.settings.jobs
        first = lo if lo % 2 else lo + 1
        if jobs <= 1:
            for n in range(first, hi + 1, 2):
                yield self.classify(n)
            return

        block = 2 * 4096
        blocks = [(start, min(start + block - 2, hi), self.settings) for start in range(first, hi + 1, block)]
        logger.info(f"Classifying [{lo}, {hi}] in {len(blocks)} blocks on {jobs} workers")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for records in pool.map(_classify_block, blocks):
                yield from records


def _classify_block(args: Tuple[int, int, EngineSettings]) -> List[ClassificationRecord]:
    start, stop, settings = args
    classifier = Classifier(settings)
    return [classifier.classify(n) for n in range(start, stop + 1, 2)]


def classify(
    n: int,
    factorization: Optional[Factorization] = None,
    oracle: bool = False,
    settings: Optional[EngineSettings] = None,
) -> ClassificationRecord:
    """Classify n with a default (or given) Classifier."""
    return Classifier(settings).classify(n, factorization=factorization, oracle=oracle)
