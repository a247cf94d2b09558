"""
Arithmetic core: modular powers, primality, factorization, Euler phi, Carmichael lambda,
prime tables, Chinese remaindering and exact-rational helpers.

Every function is pure. The cached prime tables are built once and handed out
read-only, so concurrent readers can share them.
"""

import math
import random
import time
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .exceptions import FactorizationTimeout
from .state import Factorization, Rounding

ExactRational = Fraction

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# Strong-probable-prime bases that are deterministic below the given bound.
_MR_PLANS = (
    (3_215_031_751, (2, 3, 5, 7)),
    (1 << 64, _SMALL_PRIMES),
)
_TRIAL_CHUNK = 512
_DIRECT_TRIAL = 1000


def pow_mod(base: int, exponent: int, modulus: int) -> int:
    """
    Compute base**exponent mod modulus by square-and-multiply.

    Args:
        base: Nonnegative base
        exponent: Nonnegative exponent
        modulus: Modulus >= 1

    Returns:
        Residue in [0, modulus)
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if exponent < 0 or base < 0:
        raise ValueError("base and exponent must be nonnegative")
    return pow(base, exponent, modulus)


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as a read-only int64 array (sieve of Eratosthenes)."""
    if limit < 2:
        primes = np.array([], dtype=np.int64)
    else:
        is_prime = np.ones(limit + 1, dtype=bool)
        is_prime[:2] = False
        is_prime[4::2] = False
        for p in range(3, math.isqrt(limit) + 1, 2):
            if is_prime[p]:
                is_prime[p * p :: 2 * p] = False
        primes = np.flatnonzero(is_prime).astype(np.int64)
    primes.flags.writeable = False
    return primes


def odd_primes_below(limit: int) -> np.ndarray:
    """Odd primes p < limit."""
    primes = primes_up_to(max(limit - 1, 2))
    return primes[(primes > 2) & (primes < limit)]


def odd_primes(count: int) -> List[int]:
    """
    The first `count` odd primes: 3, 5, 7, ...

    Args:
        count: How many primes, >= 1

    Returns:
        Strictly increasing list of odd primes
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    # p_n < n (ln n + ln ln n) for n >= 6; the odd primes are shifted by one.
    n = count + 1
    bound = 64 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 1
    primes = primes_up_to(bound)
    while len(primes) < count + 1:
        bound *= 2
        primes = primes_up_to(bound)
    return [int(p) for p in primes[1 : count + 1]]


def _strong_probable_prime(n: int, base: int, d: int, s: int) -> bool:
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int, rounds: int = 64) -> bool:
    """
    Strong-probable-prime test.

    Deterministic for n < 2^64. Above that, `rounds` bases are drawn from a
    generator seeded by n so the answer is reproducible.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < _SMALL_PRIMES[-1] ** 2:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for bound, bases in _MR_PLANS:
        if n < bound:
            return all(_strong_probable_prime(n, a, d, s) for a in bases)
    rng = random.Random(n)
    return all(
        _strong_probable_prime(n, rng.randrange(2, n - 1), d, s)
        for _ in range(max(rounds, 64))
    )


@lru_cache(maxsize=4)
def _trial_chunks(trial_limit: int) -> Tuple[Tuple[int, int, Tuple[int, ...]], ...]:
    """Primes in (1000, trial_limit] grouped as (first prime, product, primes)."""
    primes = [int(p) for p in primes_up_to(trial_limit) if p > _DIRECT_TRIAL]
    chunks = []
    for start in range(0, len(primes), _TRIAL_CHUNK):
        block = tuple(primes[start : start + _TRIAL_CHUNK])
        chunks.append((block[0], math.prod(block), block))
    return tuple(chunks)


@lru_cache(maxsize=1)
def _direct_primes() -> Tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(_DIRECT_TRIAL))


def _trial_divide(n: int, trial_limit: int, found: Dict[int, int]) -> int:
    """Strip prime factors <= trial_limit from n into `found`; return the cofactor."""
    for p in _direct_primes():
        if p > trial_limit or p * p > n:
            break
        if n % p == 0:
            exponent = 0
            while n % p == 0:
                n //= p
                exponent += 1
            found[p] = exponent
    if n < _DIRECT_TRIAL * _DIRECT_TRIAL or trial_limit <= _DIRECT_TRIAL:
        return n
    for first, product, block in _trial_chunks(trial_limit):
        if first * first > n:
            break
        g = math.gcd(n, product)
        if g == 1:
            continue
        for p in block:
            if g % p:
                continue
            exponent = 0
            while n % p == 0:
                n //= p
                exponent += 1
            found[p] = exponent
    return n


def _brent_split(n: int, rng: random.Random, deadline: Optional[float]) -> int:
    """Find a nontrivial divisor of composite n (Pollard rho, Brent's cycle search)."""
    if n % 2 == 0:
        return 2
    root = math.isqrt(n)
    if root * root == n:
        return root
    batch = 128
    while True:
        y, c = rng.randrange(1, n), rng.randrange(1, n)
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += batch
                if deadline is not None and time.monotonic() > deadline:
                    raise TimeoutError
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@lru_cache(maxsize=1 << 16)
def _factor_pairs(
    n: int, trial_limit: int, timeout: Optional[float], rounds: int
) -> Tuple[Tuple[int, int], ...]:
    found: Dict[int, int] = {}
    rest = _trial_divide(n, trial_limit, found)
    if rest == 1:
        return tuple(sorted(found.items()))

    deadline = None if timeout is None or timeout <= 0 else time.monotonic() + timeout
    rng = random.Random(rest)
    stack = [rest]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= trial_limit * trial_limit or is_probable_prime(m, rounds):
            # Anything left below trial_limit^2 has no factor <= trial_limit, so it is prime.
            found[m] = found.get(m, 0) + 1
            continue
        try:
            d = _brent_split(m, rng, deadline)
        except TimeoutError:
            logger.warning(f"Factorization budget of {timeout}s exhausted")
            raise FactorizationTimeout(n, timeout, cofactor=m) from None
        stack.extend((d, m // d))
    return tuple(sorted(found.items()))


def factorize(
    n: int,
    timeout: Optional[float] = 10.0,
    trial_limit: int = 1_000_000,
    rounds: int = 64,
) -> Factorization:
    """
    Factor n into primes.

    Trial division by primes <= trial_limit, then Pollard-Brent splitting with a
    strong-probable-prime test on every cofactor.

    Args:
        n: Integer >= 1
        timeout: Seconds allowed for the splitting phase (None or <= 0 disables)
        trial_limit: Trial division bound
        rounds: Primality rounds above 2^64

    Returns:
        Factorization of n; n = 1 gives an empty factor list

    Raises:
        FactorizationTimeout: the splitting phase ran past `timeout`
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pairs = _factor_pairs(n, trial_limit, timeout, rounds)
    # Repeated cofactors may have landed as separate leaves; from_pairs merges them.
    return Factorization.from_pairs(pairs)


def euler_phi(f: Factorization) -> int:
    """Euler's totient from a factorization."""
    result = 1
    for p, e in f.factors:
        result *= p ** (e - 1) * (p - 1)
    return result


def carmichael_lambda(f: Factorization) -> int:
    """Carmichael's lambda (exponent of the unit group) from a factorization."""
    result = 1
    for p, e in f.factors:
        if p == 2:
            part = 1 if e == 1 else 2 if e == 2 else 1 << (e - 2)
        else:
            part = p ** (e - 1) * (p - 1)
        result = math.lcm(result, part)
    return result


def two_adic(m: int) -> Tuple[int, int]:
    """Split m >= 1 as 2^alpha * m1 with m1 odd; returns (alpha, m1)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    alpha = (m & -m).bit_length() - 1
    return alpha, m >> alpha


def crt(residues: Sequence[int], moduli: Sequence[int]) -> Tuple[int, int]:
    """
    Chinese Remainder Theorem for pairwise coprime moduli.

    Returns:
        (x, M) with x = residues[i] mod moduli[i] for all i and M = prod(moduli)

    Raises:
        ValueError: the moduli are not pairwise coprime
    """
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli differ in length")
    x, modulus = 0, 1
    for r, m in zip(residues, moduli):
        if math.gcd(modulus, m) != 1:
            raise ValueError("moduli are not pairwise coprime")
        # x + modulus * t = r (mod m)
        t = (r - x) * pow(modulus, -1, m) % m
        x += modulus * t
        modulus *= m
    return x % modulus, modulus


# Exact-rational helpers: thin wrappers over Fraction, which keeps the denominator
# positive and the pair reduced. The density interval and the tail comparisons
# go through them.

def add(a: ExactRational, b: ExactRational) -> ExactRational:
    return Fraction(a) + Fraction(b)


def negate(a: ExactRational) -> ExactRational:
    return -Fraction(a)


def compare(a: ExactRational, b: ExactRational) -> int:
    """-1, 0 or 1 as a <, ==, > b."""
    a, b = Fraction(a), Fraction(b)
    return (a > b) - (a < b)


def to_decimal(a: ExactRational, digits: int = 6, direction: Rounding = Rounding.NEAREST) -> str:
    """
    Render a rational with `digits` digits after the point.

    Args:
        a: Value to render
        digits: Digits after the decimal point
        direction: floor, ceiling or nearest (ties to even)

    Returns:
        Decimal string such as "0.379826"
    """
    if digits < 0:
        raise ValueError("digits must be >= 0")
    scaled = Fraction(a) * 10 ** digits
    direction = Rounding(direction)
    if direction is Rounding.FLOOR:
        units = math.floor(scaled)
    elif direction is Rounding.CEILING:
        units = math.ceil(scaled)
    else:
        units = round(scaled)
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), 10 ** digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"
