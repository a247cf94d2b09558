"""
Core state definitions for giuga-half.
Defines the records passed between the arithmetic core, the engines and the CLI.
"""

from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class Verdict(str, Enum):
    """Outcome of a single sufficient-condition rule."""

    MEMBER = "member"
    NON_MEMBER = "non-member"


class RuleTag(str, Enum):
    """Rules that can fire while classifying an odd integer."""

    MOD4 = "mod4"
    PRIME_POWER = "prime_power"
    GCD_PHI_ODD = "gcd_phi_odd"
    GCD_LAMBDA_ODD = "gcd_lambda_odd"
    COFACTOR = "cofactor"
    FERMAT_FORM = "fermat_form"


# These tags only ever fire for members.
MEMBERSHIP_ONLY_RULES = frozenset(
    {RuleTag.MOD4, RuleTag.GCD_PHI_ODD, RuleTag.GCD_LAMBDA_ODD, RuleTag.COFACTOR}
)


class Method(str, Enum):
    """How the final verdict of a ClassificationRecord was reached."""

    THEOREM1 = "theorem1"
    ORACLE = "oracle"
    FERMAT_FORM = "fermat_form"
    MOD4 = "mod4"


class Rounding(str, Enum):
    """Rounding direction for decimal rendering of exact rationals."""

    FLOOR = "floor"
    CEILING = "ceiling"
    NEAREST = "nearest"


class Factorization(BaseModel):
    """Prime factorization n = prod p^e with primes strictly increasing."""

    model_config = ConfigDict(frozen=True)

    factors: Tuple[Tuple[int, int], ...] = Field(default=(), description="(prime, exponent) pairs")
    value: int = Field(default=1, ge=1, description="The factored integer")

    @model_validator(mode="after")
    def _check_reconstruction(self) -> "Factorization":
        from .arith import is_probable_prime

        previous = 1
        product = 1
        for prime, exponent in self.factors:
            if prime <= previous:
                raise ValueError("primes must be strictly increasing")
            if exponent < 1:
                raise ValueError(f"exponent of {prime} must be positive")
            if not is_probable_prime(prime):
                raise ValueError(f"{prime} is not prime")
            product *= prime ** exponent
            previous = prime
        if product != self.value:
            raise ValueError("factors do not multiply to value")
        return self

    @classmethod
    def from_pairs(cls, pairs) -> "Factorization":
        """Build from unordered (prime, exponent) pairs, merging repeated primes."""
        merged = {}
        for prime, exponent in pairs:
            merged[prime] = merged.get(prime, 0) + exponent
        factors = tuple(sorted((p, e) for p, e in merged.items() if e > 0))
        value = 1
        for prime, exponent in factors:
            value *= prime ** exponent
        return cls(factors=factors, value=value)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def omega(self) -> int:
        """Number of distinct prime factors."""
        return len(self.factors)

    @property
    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def power(self, k: int) -> "Factorization":
        """Factorization of value**k, without factoring again."""
        if k < 1:
            raise ValueError("k must be positive")
        return Factorization(
            factors=tuple((p, e * k) for p, e in self.factors),
            value=self.value ** k,
        )

    @field_serializer("factors")
    def _serialize_factors(self, factors):
        return [[str(p), e] for p, e in factors]

    @field_serializer("value")
    def _serialize_value(self, value: int) -> str:
        return str(value)


class MembershipVerdict(BaseModel):
    """Result of the characterization test: membership plus the smallest witness prime."""

    model_config = ConfigDict(frozen=True)

    member: bool
    witness_prime: Optional[int] = None

    @model_validator(mode="after")
    def _witness_iff_non_member(self) -> "MembershipVerdict":
        if self.member == (self.witness_prime is not None):
            raise ValueError("witness_prime must be present exactly when member is False")
        return self


class ClassificationRecord(BaseModel):
    """Membership verdict for one odd n with the rules that fired along the way."""

    n: int = Field(ge=1)
    member: bool
    witness_prime: Optional[int] = None
    rules_fired: List[RuleTag] = Field(default_factory=list)
    method: Method = Method.THEOREM1
    trivial: bool = Field(default=False, description="n = 1, member by convention")
    oracle_residue: Optional[int] = Field(default=None, description="G(n) mod n when the oracle ran")

    @model_validator(mode="after")
    def _check_consistency(self) -> "ClassificationRecord":
        if self.n % 2 == 0:
            raise ValueError("classified integers are odd")
        if self.member == (self.witness_prime is not None):
            raise ValueError("witness_prime must be present exactly when member is False")
        if not self.member and MEMBERSHIP_ONLY_RULES.intersection(self.rules_fired):
            raise ValueError("a sufficient membership rule fired for a non-member")
        order = list(RuleTag)
        self.rules_fired = sorted(set(self.rules_fired), key=order.index)
        return self

    @field_serializer("n")
    def _serialize_n(self, n: int) -> str:
        return str(n)

    @field_serializer("witness_prime", "oracle_residue")
    def _serialize_optional_int(self, value: Optional[int]) -> Optional[str]:
        return None if value is None else str(value)


class Progression(BaseModel):
    """Residue class r (mod M); its natural density is exactly 1/M."""

    model_config = ConfigDict(frozen=True)

    residue: int = Field(ge=0)
    modulus: int = Field(ge=1)

    @model_validator(mode="after")
    def _residue_in_range(self) -> "Progression":
        if self.residue >= self.modulus:
            raise ValueError("residue must be smaller than modulus")
        return self

    @property
    def density(self) -> Fraction:
        return Fraction(1, self.modulus)

    def __contains__(self, n: int) -> bool:
        return n % self.modulus == self.residue

    @field_serializer("residue", "modulus")
    def _serialize_int(self, value: int) -> str:
        return str(value)


class DensityReport(BaseModel):
    """Exact bounds for the density of the member set at a given tail tolerance."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    epsilon: Fraction
    k: int = Field(ge=1)
    primes_used: List[int] = Field(default_factory=list)
    union_density: Fraction
    lower: Fraction
    upper: Fraction
    decimal_lower: str
    decimal_upper: str
    clique_count: int = Field(default=0, ge=0, description="Nonempty intersections summed")

    @model_validator(mode="after")
    def _check_bounds(self) -> "DensityReport":
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.upper != Fraction(1, 2) - self.union_density:
            raise ValueError("upper must equal 1/2 - union_density")
        if self.lower != self.upper - self.epsilon:
            raise ValueError("lower must equal upper - epsilon")
        return self

    @field_serializer("epsilon", "union_density", "lower", "upper")
    def _serialize_fraction(self, value: Fraction) -> str:
        return _fraction_text(value)

    @field_serializer("primes_used")
    def _serialize_primes(self, primes: List[int]) -> List[str]:
        return [str(p) for p in primes]


class SieveResult(BaseModel):
    """Member count among odd n <= limit, measured by the complement sieve."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    limit: int = Field(ge=1)
    member_count: int = Field(ge=0)
    marked_complement_count: int = Field(ge=0)
    density: Fraction
    decimal_density: str = Field(description="density rounded to the configured digits")

    @model_validator(mode="after")
    def _counts_cover_odds(self) -> "SieveResult":
        if self.member_count + self.marked_complement_count != (self.limit + 1) // 2:
            raise ValueError("member and complement counts must cover every odd n <= limit")
        if self.density != Fraction(self.member_count, self.limit):
            raise ValueError("density must equal member_count / limit")
        return self

    @field_serializer("density")
    def _serialize_density(self, value: Fraction) -> str:
        return _fraction_text(value)


class Mismatch(BaseModel):
    """One odd n on which the independent membership tests disagree."""

    n: int
    oracle: Optional[bool] = None
    theorem: bool
    sieve: bool


class ValidationReport(BaseModel):
    """Outcome of the three-way consistency harness."""

    limit: int
    oracle_limit: int
    checked: int = 0
    mismatches: List[Mismatch] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


class EngineSettings(BaseModel):
    """
    Runtime knobs for the engines.
    Populated from the environment by src.core.config.load_settings().
    """

    jobs: int = Field(default=1, ge=1, description="Worker processes for range and sieve work")
    factor_timeout: Optional[float] = Field(default=10.0, description="Seconds per factorization; None disables")
    trial_limit: int = Field(default=1_000_000, ge=2, description="Trial division bound")
    mr_rounds: int = Field(default=64, ge=64, description="Random bases above 2^64")
    cheap_bits: int = Field(default=64, ge=1, description="Above this size classify prefers congruence rules")
    segment_size: int = Field(default=1 << 24, ge=1024, description="Odd slots per sieve segment")
    digits: int = Field(default=6, ge=1, le=60, description="Decimal digits when rendering rationals")
    log_level: str = Field(default="WARNING")
    log_file: Optional[str] = None
