"""Run the acceptance suite and print its PASS/FAIL summary.

Extra arguments are passed through to pytest.
"""
import pathlib
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(pytest.main([str(ROOT / "tests" / "test_acceptance.py"), "-q", *sys.argv[1:]]))
