#!/usr/bin/env python3
"""Reproduce the relaxation-oscillation experiment at desk scale.

Writes the trajectory CSV and cycle metrics for the stiff reference
parameter set (strong anisotropy, timescale ratio 1e-4) into out/relaxation/.
"""

import sys
from pathlib import Path

from crawlerlab.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(main([
        "simulate",
        "--config", str(ROOT / "fixtures" / "relaxation.json"),
        "--out", str(ROOT / "out" / "relaxation"),
    ]))
