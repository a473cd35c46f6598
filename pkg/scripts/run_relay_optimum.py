#!/usr/bin/env python3
"""Describing-function sweep and speed optimum for the reference relay.

Writes the Z-sweep CSV (frequency, amplitude, speed, power, relative phase)
and the closed-form optimum JSON into out/relay_optimum/.
"""

import sys
from pathlib import Path

from crawlerlab.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(main([
        "hb",
        "--config", str(ROOT / "fixtures" / "relay_reference.json"),
        "--out", str(ROOT / "out" / "relay_optimum"),
    ]))
