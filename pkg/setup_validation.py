"""
Setup and validation script for giuga-half
Run this after installation to verify everything is configured correctly.
"""

import sys
from pathlib import Path


def check_python_version():
    """Verify Python version >= 3.10"""
    print("Checking Python version...", end=" ")
    version = sys.version_info
    if version.major >= 3 and version.minor >= 10:
        print(f"✅ Python {version.major}.{version.minor}.{version.micro}")
        return True
    print(f"❌ Python {version.major}.{version.minor} (requires 3.10+)")
    return False


def check_dependencies():
    """Check if required packages are installed"""
    print("\nChecking dependencies...")
    # Map package names to their import names
    required = {
        "numpy": "numpy",
        "pandas": "pandas",
        "pydantic": "pydantic",
        "loguru": "loguru",
        "python-dotenv": "dotenv",
        "click": "click",
    }

    missing = []
    for package, import_name in required.items():
        try:
            __import__(import_name)
            print(f"  ✅ {package}")
        except ImportError:
            print(f"  ❌ {package} (missing)")
            missing.append(package)

    if missing:
        print(f"\n⚠️  Missing packages: {', '.join(missing)}")
        print("Run: pip install -r requirements.txt")
        return False
    return True


def check_environment():
    """Load GIUGA_HALF_* settings and report them"""
    print("\nChecking environment configuration...")

    if Path(".env").exists():
        print("  ✅ .env file exists")
    else:
        print("  ℹ️  .env file not found, using defaults (see .env.example)")

    try:
        from src.core.config import load_settings
        from src.core.exceptions import ConfigurationError
    except ImportError as e:
        print(f"  ❌ Import failed: {e}")
        return False

    try:
        settings = load_settings()
    except ConfigurationError as e:
        print(f"  ❌ {e}")
        return False

    for name, value in settings.model_dump().items():
        print(f"  ✅ {name} = {value}")
    return True


def check_directories():
    """Create the log directory when a log file is configured"""
    print("\nChecking directory structure...")
    from src.core.config import load_settings

    log_file = load_settings().log_file
    if not log_file:
        print("  ℹ️  No log file configured")
        return True
    log_dir = Path(log_file).parent
    if log_dir.exists():
        print(f"  ✅ {log_dir}/")
    else:
        print(f"  📁 Creating {log_dir}/")
        log_dir.mkdir(parents=True, exist_ok=True)
    return True


def run_quick_test():
    """Run a quick functionality test"""
    print("\nRunning functionality test...")

    try:
        from fractions import Fraction

        from src.engines.density import series_partial_sum, union_density
        from src.engines.membership import classify, g_mod
        from src.engines.sieve import cross_validate

        print("  Classifying 2021 and 25...", end=" ")
        assert classify(2021).member and classify(25).witness_prime == 5
        print("✅")

        print("  Checking the oracle on 9...", end=" ")
        assert g_mod(9) == 6
        print("✅")

        print("  Checking series against union at k=6...", end=" ")
        assert series_partial_sum(13) == Fraction(1, 2) - union_density(6)
        print("✅")

        print("  Cross-validating up to 1000...", end=" ")
        assert cross_validate(1000).ok
        print("✅")
        return True
    except Exception as e:
        print(f"❌ Error: {e}")
        return False


def main():
    """Run all validation checks"""
    print("=" * 60)
    print("giuga-half - Setup Validation")
    print("=" * 60)

    results = {
        "Python Version": check_python_version(),
        "Dependencies": check_dependencies(),
    }
    if results["Dependencies"]:
        results["Environment"] = check_environment()
        if results["Environment"]:
            results["Directories"] = check_directories()
            results["Functionality"] = run_quick_test()

    print("\n" + "=" * 60)
    print("VALIDATION SUMMARY")
    print("=" * 60)
    for check, passed in results.items():
        print(f"{'✅' if passed else '❌'} {check}")

    if all(results.values()):
        print("\n🎉 All checks passed. Try: python -m src.main check 2021")
        return 0
    print("\n⚠️  Some checks failed. Fix the issues above and re-run.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
