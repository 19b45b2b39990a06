#!/usr/bin/env python3
"""
Verification script for the completedcoh package.
This script checks that all essential files are present and have the expected content.
"""

import os
import sys

MODULES = [
    "__init__.py",
    "__main__.py",
    "abelian.py",
    "cech_compare.py",
    "cli_runner.py",
    "complex_core.py",
    "config.py",
    "errors.py",
    "group_towers.py",
    "library.py",
    "limits_engine.py",
    "local_systems.py",
    "log.py",
    "report.py",
    "smith_engine.py",
]

BUILTINS = [
    "cech_demo.cfg",
    "circle.cfg",
    "cylinder_boundary.cfg",
    "excise_demo.cfg",
    "heisenberg.cfg",
    "torus_defect1.cfg",
    "torus_full.cfg",
]


def check_files():
    """Check that all required files are present."""
    required_files = [
        "CONFIG_FORMAT.md",
        "DESIGN.md",
        "MANIFEST.md",
        "README.md",
        "README_API.md",
        "REPORT_SCHEMA.md",
        "pyproject.toml",
        "requirements.txt",
        "setup.py",
    ]
    required_files += [os.path.join("completedcoh", m) for m in MODULES]
    required_files += [os.path.join("completedcoh", "builtin", b) for b in BUILTINS]

    missing_files = [f for f in required_files if not os.path.exists(f)]
    if missing_files:
        print(f"✗ Missing files: {missing_files}")
        return False
    print("✓ All required files are present")
    return True


def check_setup_py():
    """Check that setup.py and pyproject.toml agree on the package."""
    try:
        with open("setup.py", "r") as f:
            setup_text = f.read()
        with open("pyproject.toml", "r") as f:
            project_text = f.read()
    except Exception as e:
        print(f"✗ Error reading build files: {e}")
        return False

    for label, content in (("setup.py", setup_text), ("pyproject.toml", project_text)):
        if "completedcoh" not in content:
            print(f"✗ 'completedcoh' not found in {label}")
            return False
        if "sympy" not in content:
            print(f"✗ sympy dependency not declared in {label}")
            return False
        if "completedcoh.cli_runner:main" not in content:
            print(f"✗ console script missing from {label}")
            return False
        if "builtin/*.cfg" not in content:
            print(f"✗ builtin configs not listed as package data in {label}")
            return False

    print("✓ setup.py and pyproject.toml have correct configuration")
    return True


def check_builtin_configs():
    """Check that every builtin config names itself and lists its checks."""
    try:
        for name in BUILTINS:
            with open(os.path.join("completedcoh", "builtin", name), "r") as f:
                content = f.read()
            stem = os.path.splitext(name)[0]
            if f"name = {stem}" not in content:
                print(f"✗ {name} does not declare 'name = {stem}'")
                return False
            if "checks =" not in content:
                print(f"✗ {name} has no checks line")
                return False
        print("✓ Builtin configs have expected content")
        return True
    except Exception as e:
        print(f"✗ Error reading builtin configs: {e}")
        return False


def main():
    """Run all verification checks."""
    print("Verifying completedcoh package setup...")
    print("=" * 50)

    # Change to package directory
    script_dir = os.path.dirname(os.path.abspath(__file__))
    os.chdir(script_dir)

    # Run checks
    files_ok = check_files()
    setup_ok = check_setup_py() if files_ok else False
    configs_ok = check_builtin_configs() if files_ok else False

    print("\n" + "=" * 50)
    if files_ok and setup_ok and configs_ok:
        print("✓ All verification checks passed!")
        print("\nThis package is ready to be installed with:")
        print("  pip install .")
        print("\nAfter installing, test with:")
        print("  python run_tests.py")
        return 0
    else:
        print("✗ Some verification checks failed!")
        return 1


if __name__ == "__main__":
    sys.exit(main())
