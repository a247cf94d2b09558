"""
Worked Instances Demo
Walks through the classic examples: members, non-members with their witnesses,
a Fermat-form input too large to factor, and the exact density interval.
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv

from src.core.config import load_settings
from src.engines.density import density_interval, union_density
from src.engines.membership import Classifier, g_mod
from src.engines.sieve import ComplementSieve


def run_membership_demo(classifier: Classifier):
    """
    Demo: verdicts, witnesses and the rules that fired.
    """
    print("=" * 80)
    print("🔎 MEMBERSHIP: sum j^((n-1)/2) = 0 (mod n)?")
    print("=" * 80)

    for n in (2021, 2021 ** 2, 25, 9, 33, 65, 85):
        record = classifier.classify(n, oracle=n <= 10 ** 6)
        status = "✅ member" if record.member else f"🚫 non-member (witness {record.witness_prime})"
        rules = ", ".join(tag.value for tag in record.rules_fired) or "-"
        residue = "" if record.oracle_residue is None else f"  G(n) mod n = {record.oracle_residue}"
        print(f"   n = {n:<10} {status:<32} rules: {rules}{residue}")

    print("\n   Prime powers: p^k is a member exactly when k is odd")
    for p in (3, 5, 7):
        cells = []
        for k in range(1, 5):
            n = p ** k
            cells.append(f"{p}^{k}: {'M' if classifier.classify(n).member else '-'} (G={g_mod(n)})")
        print("   " + "   ".join(cells))

    n = 2 ** 96 + 1
    record = classifier.classify(n)
    print(f"\n   2^96+1 = {n}")
    print(f"   member={record.member} via {record.method.value}, decided without factoring")


def run_density_demo(classifier: Classifier):
    """
    Demo: exact inclusion-exclusion against the sieve.
    """
    print("\n" + "=" * 80)
    print("📐 DENSITY")
    print("=" * 80)

    for k in range(1, 7):
        value = union_density(k)
        print(f"   union of F_p over the first {k - 1} odd primes: {value} ≈ {float(value):.6f}")

    report = density_interval(Fraction(1, 1000), jobs=classifier.settings.jobs)
    print(f"\n   epsilon = 1/1000 → k = {report.k}")
    print(f"   density in [{report.decimal_lower}, {report.decimal_upper}]")

    sieve = ComplementSieve(classifier.settings.segment_size, classifier.settings.jobs)
    print("\n   Sieve checkpoints:")
    print(sieve.checkpoints([10 ** 4, 10 ** 5, 10 ** 6]).to_string(index=False))


if __name__ == "__main__":
    load_dotenv()
    classifier = Classifier(load_settings())
    run_membership_demo(classifier)
    run_density_demo(classifier)
