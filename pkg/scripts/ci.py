#!/usr/bin/env python3
"""Local CI runner, one subcommand per test area.

The package is installed once with its ``test`` extra, then each selected
area runs ``unittest discover`` over its own test directory; ``ruff`` lints
``src`` and ``tests``. Run from the project root before pushing.

Examples:

    python scripts/ci.py core
    python scripts/ci.py codec controller
    python scripts/ci.py sim --no-install
    python scripts/ci.py ruff
    python scripts/ci.py all          # every area, then ruff
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path
from typing import Sequence

PROJECT_ROOT = Path(__file__).resolve().parent.parent
PYPROJECT = PROJECT_ROOT / "pyproject.toml"

#? Test area -> what it covers. The directory is always tests/test_<area>.
AREAS: dict[str, str] = {
    "core": "enums, models, config, parsing, formatting, io, timing",
    "codec": "AT codec round trips, totality and reframing",
    "uart": "baud generator and serial link timing",
    "modem": "SIM store, cellular network, AT execution",
    "controller": "command table and firmware state machine",
    "sim": "scheduler, scenarios, engine, report, baud table, REPL, CLI",
    "observability": "setup_logging sinks",
    "validation": "type_checked and its leak guarantees",
}


def _run(cmd: Sequence[str]) -> None:
    print(f"$ {' '.join(cmd)}", flush=True)
    code = subprocess.run(cmd, cwd=PROJECT_ROOT).returncode
    if code != 0:
        print(f"!! command failed with exit code {code}", file=sys.stderr)
        sys.exit(code)


def _banner(title: str) -> None:
    print()
    print("=" * 72)
    print(f"  {title}")
    print("=" * 72)


def install(extra: str = "test") -> None:
    _run([sys.executable, "-m", "pip", "install", "--upgrade", "pip"])
    _run([sys.executable, "-m", "pip", "install", "-e", f".[{extra}]"])


def run_area(area: str) -> None:
    test_dir = f"tests/test_{area}"
    if not (PROJECT_ROOT / test_dir).is_dir():
        print(f"!! missing test directory: {test_dir}", file=sys.stderr)
        sys.exit(2)
    _banner(f"area: {area}  --  {AREAS[area]}")
    _run([sys.executable, "-m", "unittest", "discover", test_dir, "-v"])


def run_ruff() -> None:
    _banner("ruff  --  lint src and tests")
    _run([sys.executable, "-m", "pip", "install", "ruff"])
    _run([sys.executable, "-m", "ruff", "check", "src", "tests"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scripts/ci.py",
        description="Run the test areas and the lint job locally.",
    )
    parser.add_argument(
        "targets",
        nargs="+",
        choices=[*AREAS, "ruff", "all"],
        help="Test areas to run, 'ruff', or 'all'. Stops on first failure.",
    )
    parser.add_argument(
        "--no-install",
        action="store_true",
        help="Skip the editable install (reuse the current environment).",
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if not PYPROJECT.is_file():
        print(f"pyproject.toml not found at {PYPROJECT}", file=sys.stderr)
        return 2
    args = build_parser().parse_args(argv)
    targets = [*AREAS, "ruff"] if "all" in args.targets else args.targets

    areas = [t for t in targets if t in AREAS]
    if areas and not args.no_install:
        install()
    for area in areas:
        run_area(area)
    if "ruff" in targets:
        run_ruff()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
