"""
Density engine: exact asymptotic density of the member set.

The complement of the member set among odd integers is the union of the residue
classes F_p = {p^2 mod 2p(p-1)} over odd primes p. A finite family of these classes
has a common element iff the product m of its primes satisfies gcd(m, phi(m)) = 1,
and the intersection is then one class modulo 2*m*lambda(m). Inclusion-exclusion over
the cliques of the pairwise compatibility graph gives the density of a finite union
exactly; a rigorous bound on the prime tail decides how many primes are needed.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from ..core.arith import (
    add,
    compare,
    crt,
    euler_phi,
    factorize,
    is_probable_prime,
    negate,
    odd_primes,
    odd_primes_below,
    to_decimal,
)
from ..core.exceptions import TruncationError
from ..core.state import DensityReport, Progression, Rounding

_TAIL_SCALE = 10 ** 40
_INITIAL_CUTOFF = 1 << 12
_MAX_CUTOFF = 1 << 26


def _require_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_probable_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def progression_for_prime(p: int) -> Progression:
    """
    F_p as a residue class: p^2 modulo 2p(p-1).

    n lies in it exactly when p | n and (p-1) | (n-1)/2.
    """
    _require_odd_prime(p)
    modulus = 2 * p * (p - 1)
    return Progression(residue=p * p % modulus, modulus=modulus)


def in_M(m: int, timeout: Optional[float] = 10.0) -> bool:
    """True iff m > 2 and gcd(m, phi(m)) = 1 (such m are odd and squarefree)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m <= 2:
        return False
    return math.gcd(m, euler_phi(factorize(m, timeout=timeout))) == 1


def intersect_progressions(primes: Iterable[int]) -> Optional[Progression]:
    """
    Common elements of F_p over a set of distinct odd primes.

    Args:
        primes: Nonempty collection of distinct odd primes

    Returns:
        The class n = 0 (mod m), n = 1 (mod 2*lambda(m)) modulo 2*m*lambda(m),
        or None when the classes have no common element
    """
    primes = sorted(primes)
    if not primes:
        raise ValueError("need at least one prime")
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    for p in primes:
        _require_odd_prime(p)

    m = math.prod(primes)
    phi = math.prod(p - 1 for p in primes)
    if math.gcd(m, phi) != 1:
        return None
    lam = math.lcm(*(p - 1 for p in primes))
    residue, modulus = crt([0, 1], [m, 2 * lam])
    return Progression(residue=residue, modulus=modulus)


class CompatibilityGraph:
    """
    Odd primes joined when neither divides the other minus one.

    A set of vertices is a clique exactly when its product m has gcd(m, phi(m)) = 1,
    i.e. when the corresponding classes F_p intersect.
    """

    def __init__(self, primes: Sequence[int]):
        self.vertices: Tuple[int, ...] = tuple(sorted(int(p) for p in primes))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("primes must be distinct")
        for p in self.vertices:
            _require_odd_prime(p)
        self._index = {p: i for i, p in enumerate(self.vertices)}
        # _later[i]: bitmask of neighbours with a larger index than i.
        self._later: List[int] = []
        for i, p in enumerate(self.vertices):
            mask = 0
            for j in range(i + 1, len(self.vertices)):
                if self.compatible(p, self.vertices[j]):
                    mask |= 1 << j
            self._later.append(mask)

    @classmethod
    def from_primes(cls, primes: Iterable[int]) -> "CompatibilityGraph":
        return cls(list(primes))

    @staticmethod
    def compatible(p: int, q: int) -> bool:
        return p != q and (q - 1) % p != 0 and (p - 1) % q != 0

    def neighbors(self, p: int) -> Tuple[int, ...]:
        if p not in self._index:
            raise KeyError(f"{p} is not a vertex")
        return tuple(q for q in self.vertices if self.compatible(p, q))

    def is_clique(self, subset: Iterable[int]) -> bool:
        subset = list(subset)
        return all(
            self.compatible(p, q) for i, p in enumerate(subset) for q in subset[i + 1 :]
        )

    def cliques(self) -> Iterator[Tuple[int, ...]]:
        """Every nonempty clique, as ascending tuples, in depth-first order."""
        for i, p in enumerate(self.vertices):
            stack = [((p,), self._later[i])]
            while stack:
                clique, candidates = stack.pop()
                yield clique
                children = []
                while candidates:
                    low = candidates & -candidates
                    j = low.bit_length() - 1
                    candidates ^= low
                    children.append((clique + (self.vertices[j],), candidates & self._later[j]))
                stack.extend(reversed(children))

    def clique_count(self) -> int:
        return sum(self.signed_sum(i, 0)[1] for i in range(len(self.vertices)))

    def common_denominator(self) -> int:
        """2 * prod(p) * lcm(p - 1); every 2*m*lambda(m) over cliques divides it."""
        if not self.vertices:
            return 2
        return 2 * math.prod(self.vertices) * math.lcm(*(p - 1 for p in self.vertices))

    def signed_sum(self, root: int, common: int) -> Tuple[int, int]:
        """
        Inclusion-exclusion numerator over cliques whose smallest vertex is vertices[root].

        Returns:
            (sum of (-1)^(|S|-1) * common / (2*m_S*lambda(m_S)), number of cliques)
        """
        p = self.vertices[root]
        stack = [(p, p - 1, 1, self._later[root])]
        numerator = 0
        count = 0
        while stack:
            m, lam, size, candidates = stack.pop()
            count += 1
            if common:
                term = common // (2 * m * lam)
                numerator += term if size % 2 else -term
            rest = candidates
            while rest:
                low = rest & -rest
                j = low.bit_length() - 1
                rest ^= low
                q = self.vertices[j]
                stack.append((m * q, math.lcm(lam, q - 1), size + 1, candidates & self._later[j]))
        return numerator, count


def _root_sum(args: Tuple[CompatibilityGraph, int, int]) -> Tuple[int, int]:
    graph, root, common = args
    return graph.signed_sum(root, common)


def _union_terms(primes: Sequence[int], jobs: int = 1) -> Tuple[Fraction, int]:
    if not primes:
        return Fraction(0), 0
    graph = CompatibilityGraph(primes)
    common = graph.common_denominator()
    tasks = [(graph, i, common) for i in range(len(graph.vertices))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_root_sum, tasks))
    else:
        parts = [_root_sum(task) for task in tasks]
    # Integer partial sums: the reduction does not depend on completion order.
    numerator = sum(part for part, _ in parts)
    cliques = sum(count for _, count in parts)
    return Fraction(numerator, common), cliques


def union_density(k: int, jobs: int = 1) -> Fraction:
    """
    Exact density of the union of F_p over the first k-1 odd primes.

    Args:
        k: Truncation index >= 1 (k = 1 is the empty union)
        jobs: Worker processes, partitioned by smallest clique prime

    Returns:
        The density as a reduced fraction, relative to all positive integers
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    primes = odd_primes(k - 1) if k > 1 else []
    density, cliques = _union_terms(primes, jobs)
    logger.success(f"Union density for k={k}: {cliques} nonempty intersections")
    return density


def prime_tail_bounds(k: int, cutoff: int) -> Tuple[Fraction, Fraction]:
    """
    Rigorous interval for sum_{j >= k} 1/(2 p_j (p_j - 1)).

    Primes below `cutoff` are summed with outward rounding at scale 10^40; the
    primes from `cutoff` on are bounded by sum_{n >= cutoff} 1/(2n(n-1)) = 1/(2(cutoff-1)).
    """
    if k < 1 or cutoff < 3:
        raise ValueError("need k >= 1 and cutoff >= 3")
    lows, highs = _scaled_suffix_sums(cutoff)
    index = min(k - 1, len(lows) - 1)
    remainder = Fraction(1, 2 * (cutoff - 1))
    return Fraction(lows[index], _TAIL_SCALE), Fraction(highs[index], _TAIL_SCALE) + remainder


def _scaled_suffix_sums(cutoff: int) -> Tuple[List[int], List[int]]:
    """Suffix sums of floor/ceil(scale / (2p(p-1))) over odd primes p < cutoff, with a trailing 0."""
    primes = [int(p) for p in odd_primes_below(cutoff)]
    lows = [0] * (len(primes) + 1)
    highs = [0] * (len(primes) + 1)
    for i in range(len(primes) - 1, -1, -1):
        d = 2 * primes[i] * (primes[i] - 1)
        lows[i] = lows[i + 1] + _TAIL_SCALE // d
        highs[i] = highs[i + 1] - (-_TAIL_SCALE // d)
    return lows, highs


def truncation_index(
    epsilon: Fraction,
    cutoff: int = _INITIAL_CUTOFF,
    max_cutoff: int = _MAX_CUTOFF,
) -> int:
    """
    Minimal k with sum_{j >= k} 1/(2 p_j (p_j - 1)) < epsilon, p_1 = 3.

    The decision for k and k-1 is made on rigorous intervals; the cutoff doubles
    until both decisions are unambiguous.

    Raises:
        TruncationError: still ambiguous at max_cutoff
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    while cutoff <= max_cutoff:
        lows, highs = _scaled_suffix_sums(cutoff)
        remainder = Fraction(1, 2 * (cutoff - 1))
        found = None
        for k in range(1, len(highs) + 1):
            if compare(add(Fraction(highs[k - 1], _TAIL_SCALE), remainder), epsilon) < 0:
                found = k
                break
        settled = found == 1 or (
            found is not None and compare(Fraction(lows[found - 2], _TAIL_SCALE), epsilon) >= 0
        )
        if settled:
            logger.success(f"Truncation index {found} for epsilon={epsilon} (cutoff {cutoff})")
            return found
        logger.info(f"Tail decision ambiguous at cutoff {cutoff}; doubling")
        cutoff *= 2
    raise TruncationError(f"could not settle the truncation index for epsilon={epsilon} below {max_cutoff}")


def density_interval(
    epsilon: Fraction,
    digits: int = 6,
    jobs: int = 1,
) -> DensityReport:
    """
    Bounds for the density of the member set with error at most epsilon.

    upper = 1/2 - union_density(k), lower = upper - epsilon; the decimals are
    rounded outward.
    """
    epsilon = Fraction(epsilon)
    k = truncation_index(epsilon)
    primes = odd_primes(k - 1) if k > 1 else []
    union, cliques = _union_terms(primes, jobs)
    upper = add(Fraction(1, 2), negate(union))
    lower = add(upper, negate(epsilon))
    return DensityReport(
        epsilon=epsilon,
        k=k,
        primes_used=primes,
        union_density=union,
        lower=lower,
        upper=upper,
        decimal_lower=to_decimal(lower, digits, Rounding.FLOOR),
        decimal_upper=to_decimal(upper, digits, Rounding.CEILING),
        clique_count=cliques,
    )


def series_partial_sum(prime_bound: int) -> Fraction:
    """
    sum of (-1)^omega(m) / (2 m lambda(m)) over m = 1 and every m in M whose
    primes are all below prime_bound.

    Enumerates squarefree products directly, pruning as soon as gcd(m, phi(m)) > 1
    (a product that fails stays failed under any extension).
    """
    if prime_bound < 2:
        raise ValueError("prime_bound must be >= 2")
    primes = [int(p) for p in odd_primes_below(prime_bound)]
    common = 2 * math.prod(primes) * (math.lcm(*(p - 1 for p in primes)) if primes else 1)

    numerator = common // 2
    stack = [(0, 1, 1, 1, 0)]
    while stack:
        start, m, phi, lam, omega = stack.pop()
        for index in range(start, len(primes)):
            q = primes[index]
            m_next, phi_next = m * q, phi * (q - 1)
            if math.gcd(m_next, phi_next) != 1:
                continue
            lam_next = math.lcm(lam, q - 1)
            term = common // (2 * m_next * lam_next)
            numerator += -term if omega % 2 == 0 else term
            stack.append((index + 1, m_next, phi_next, lam_next, omega + 1))
    return Fraction(numerator, common)
