#!/usr/bin/env python3
"""
Test runner for the mooncat laboratory.

Runs pytest for one test category and writes an HTML report, a JUnit file and
(optionally) an HTML coverage report under reports/. The newest reports are
also reachable through reports/*_latest.

Usage:
    python run_tests.py                    # Everything
    python run_tests.py unit               # tests/unit only
    python run_tests.py scenario --fast    # Scenarios without the slow ones
    python run_tests.py --quick            # Unit tests, no slow ones, stop after 3 failures
    python run_tests.py --failed           # Re-run last failures
    python run_tests.py --no-coverage      # Skip coverage
"""

import argparse
import subprocess
import sys
from datetime import datetime
from pathlib import Path
from typing import List

PROJECT_ROOT = Path(__file__).parent.absolute()
REPORTS_DIR = PROJECT_ROOT / "reports"

CATEGORIES = {
    "all": ("tests/", None),
    "unit": ("tests/unit/", "unit"),
    "integration": ("tests/integration/", "integration"),
    "scenario": ("tests/scenarios/", "scenario"),
}


def build_command(category: str, quick: bool, fast: bool, coverage: bool, failed_only: bool,
                  stamp: str) -> List[str]:
    """Assemble the pytest command line for one run."""
    if quick:
        category, fast = "unit", True
    path, marker = CATEGORIES[category]
    markers = [m for m in (marker, "not slow" if fast else None) if m]

    cmd = [sys.executable, "-m", "pytest", path, "--tb=short", "-ra", "--strict-markers"]
    if markers:
        cmd.extend(["-m", " and ".join(markers)])
    if quick:
        cmd.append("--maxfail=3")
    if failed_only:
        cmd.append("--lf")
    cmd.extend([
        f"--html={REPORTS_DIR / f'test_report_{stamp}.html'}",
        "--self-contained-html",
        f"--junitxml={REPORTS_DIR / f'junit_{stamp}.xml'}",
    ])
    if coverage:
        cmd.extend([
            "--cov=mooncat",
            f"--cov-report=html:{REPORTS_DIR / f'coverage_{stamp}'}",
            "--cov-report=term-missing",
        ])
    return cmd


def _point_latest(link_name: str, target: str) -> None:
    link = REPORTS_DIR / link_name
    if link.exists() or link.is_symlink():
        link.unlink()
    link.symlink_to(target)


def main() -> int:
    """Parse arguments, run pytest and link the newest reports."""
    parser = argparse.ArgumentParser(description="Run the mooncat test suite")
    parser.add_argument("category", nargs="?", default="all", choices=sorted(CATEGORIES))
    parser.add_argument("--quick", action="store_true", help="Fast unit tests only")
    parser.add_argument("--fast", action="store_true", help="Deselect tests marked slow")
    parser.add_argument("--no-coverage", dest="coverage", action="store_false", help="Skip coverage")
    parser.add_argument("--failed", dest="failed_only", action="store_true", help="Re-run last failures")
    args = parser.parse_args()

    REPORTS_DIR.mkdir(exist_ok=True)
    stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    cmd = build_command(args.category, args.quick, args.fast, args.coverage, args.failed_only, stamp)

    print(f"\n{'=' * 60}\nRunning: {' '.join(cmd)}\n{'=' * 60}\n")
    result = subprocess.run(cmd, cwd=PROJECT_ROOT)

    _point_latest("test_report_latest.html", f"test_report_{stamp}.html")
    print(f"\nHTML report: {REPORTS_DIR / f'test_report_{stamp}.html'}")
    print(f"JUnit XML:   {REPORTS_DIR / f'junit_{stamp}.xml'}")
    if args.coverage:
        _point_latest("coverage_latest", f"coverage_{stamp}")
        print(f"Coverage:    {REPORTS_DIR / f'coverage_{stamp}' / 'index.html'}")
    return result.returncode


if __name__ == "__main__":
    sys.exit(main())
