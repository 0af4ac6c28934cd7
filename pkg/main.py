#!/usr/bin/env python3
"""
mooncat - Numerical laboratory for dissipative moon-cat qubits

Entry point for running laboratory commands.

Usage:
    python main.py kernel --config config/templates/kernel.ini
    python main.py repcode --config config/templates/repcode.ini --seed 7 --threads 4
    python main.py --help
"""

import sys

from mooncat.cli import main

if __name__ == "__main__":
    sys.exit(main())
