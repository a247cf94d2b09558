"""
Sieve engine: empirical member counts by marking the complement.

Odd n is stored at slot (n - 1) // 2. For every odd prime p with p^2 <= N the class
F_p = {p^2 mod 2p(p-1)} is marked from slot (p^2 - 1) / 2 with step p(p-1); the
unmarked slots are exactly the members.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from ..core.arith import odd_primes_below, to_decimal
from ..core.state import Mismatch, SieveResult, ValidationReport
from .membership import g_mod, is_member

CROSS_VALIDATE_LIMIT = 10 ** 5
ORACLE_CROSS_LIMIT = 10 ** 4


def _marking_primes(limit: int) -> np.ndarray:
    return odd_primes_below(math.isqrt(limit) + 1)


def _sieve_segment(start: int, stop: int, primes: Sequence[int]) -> np.ndarray:
    """Member flags for slots [start, stop)."""
    members = np.ones(stop - start, dtype=bool)
    for p in primes:
        p = int(p)
        first = (p * p - 1) // 2
        if first >= stop:
            break
        step = p * (p - 1)
        if first < start:
            first += -(-(start - first) // step) * step
        members[first - start :: step] = False
    return members


def _count_segment(args: Tuple[int, int, int, Tuple[int, ...]]) -> Tuple[int, List[int]]:
    """Members in [start, stop) plus running counts at each cut (slot count from start)."""
    start, stop, limit, cuts = args
    members = _sieve_segment(start, stop, _marking_primes(limit))
    running = np.cumsum(members, dtype=np.int64)
    return int(running[-1]) if len(running) else 0, [int(running[c - 1]) if c else 0 for c in cuts]


class ComplementSieve:
    """
    Segmented complement sieve.
    Segments are independent; with jobs > 1 they are counted on a process pool and
    the counts summed in segment order.
    """

    def __init__(self, segment_size: int = 1 << 24, jobs: int = 1):
        if segment_size < 1 or jobs < 1:
            raise ValueError("segment_size and jobs must be positive")
        self.segment_size = segment_size
        self.jobs = jobs

    def members(self, limit: int) -> np.ndarray:
        """Member flags for every odd n <= limit (slot i is n = 2i + 1)."""
        if limit < 1:
            raise ValueError("limit must be >= 1")
        slots = (limit + 1) // 2
        primes = _marking_primes(limit)
        flags = np.empty(slots, dtype=bool)
        for start in range(0, slots, self.segment_size):
            stop = min(start + self.segment_size, slots)
            flags[start:stop] = _sieve_segment(start, stop, primes)
        return flags

    def count(self, limit: int) -> int:
        return self._counts([limit])[0]

    def result(self, limit: int, digits: int = 6) -> SieveResult:
        members = self.count(limit)
        density = Fraction(members, limit)
        return SieveResult(
            limit=limit,
            member_count=members,
            marked_complement_count=(limit + 1) // 2 - members,
            density=density,
            decimal_density=to_decimal(density, digits),
        )

    def checkpoints(self, limits: Iterable[int], digits: int = 6) -> pd.DataFrame:
        """One row (N, member_count, density) per checkpoint, in increasing N."""
        limits = sorted(set(limits))
        counts = self._counts(limits)
        return pd.DataFrame(
            {
                "N": limits,
                "member_count": counts,
                "density": [to_decimal(Fraction(c, n), digits) for c, n in zip(counts, limits)],
            }
        )

    def _counts(self, limits: Sequence[int]) -> List[int]:
        if not limits or min(limits) < 1:
            raise ValueError("limits must be >= 1")
        top = max(limits)
        slots = (top + 1) // 2
        tasks = []
        for start in range(0, slots, self.segment_size):
            stop = min(start + self.segment_size, slots)
            cuts = tuple((n + 1) // 2 - start for n in limits if start < (n + 1) // 2 <= stop)
            tasks.append((start, stop, top, cuts))
        logger.info(f"Sieving {slots} odd slots in {len(tasks)} segments")

        if self.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                parts = list(pool.map(_count_segment, tasks))
        else:
            parts = [_count_segment(task) for task in tasks]

        found = {}
        before = 0
        for (start, stop, _, cuts), (total, at_cuts) in zip(tasks, parts):
            for cut, running in zip(cuts, at_cuts):
                found[start + cut] = before + running
            before += total
        return [found[(n + 1) // 2] for n in limits]


def complement_sieve(limit: int, segment_size: int = 1 << 24) -> np.ndarray:
    """Member flags over odd n <= limit; slot i holds n = 2i + 1."""
    if limit < 3:
        raise ValueError("limit must be >= 3")
    return ComplementSieve(segment_size).members(limit)


def empirical_density(
    limit: int, segment_size: int = 1 << 24, jobs: int = 1, digits: int = 6
) -> SieveResult:
    """Count members among odd n <= limit; density is member_count / limit."""
    if limit < 3:
        raise ValueError("limit must be >= 3")
    result = ComplementSieve(segment_size, jobs).result(limit, digits)
    logger.success(f"{result.member_count} members up to {limit}")
    return result


def least_element(p: int, limit: Optional[int] = None) -> Optional[int]:
    """
    Smallest positive n with p | n and (p - 1) | (n - 1)/2, found by scanning odd n.

    Returns None when no such n <= limit exists (limit defaults to 2p(p-1)).
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd prime")
    limit = 2 * p * (p - 1) if limit is None else limit
    n = np.arange(1, limit + 1, 2, dtype=np.int64)
    hits = np.flatnonzero((n % p == 0) & (((n - 1) // 2) % (p - 1) == 0))
    return int(n[hits[0]]) if len(hits) else None


def cross_validate(limit: int) -> ValidationReport:
    """
    Compare the sieve, the characterization and (for n <= 10^4) the brute-force oracle
    on every odd n <= limit.
    """
    if limit < 3 or limit > CROSS_VALIDATE_LIMIT:
        raise ValueError(f"limit must lie in [3, {CROSS_VALIDATE_LIMIT}]")
    oracle_limit = min(limit, ORACLE_CROSS_LIMIT)
    sieve = complement_sieve(limit)
    mismatches = []
    for n in range(1, limit + 1, 2):
        theorem = is_member(n).member
        sieved = bool(sieve[(n - 1) // 2])
        oracle = g_mod(n) == 0 if n <= oracle_limit else None
        if sieved != theorem or (oracle is not None and oracle != theorem):
            logger.error(f"Disagreement at n={n}: oracle={oracle} theorem={theorem} sieve={sieved}")
            mismatches.append(Mismatch(n=n, oracle=oracle, theorem=theorem, sieve=sieved))
    return ValidationReport(
        limit=limit,
        oracle_limit=oracle_limit,
        checked=(limit + 1) // 2,
        mismatches=mismatches,
    )
