#!/usr/bin/env python3
"""Scan the sensorimotor gain across the oscillation threshold.

Builds a temporary sweep config around the strongly dissipative reference
point and writes the per-point regime classification into out/regime_scan/.
"""

import json
import sys
import tempfile
from pathlib import Path

from crawlerlab.bifurcation import hopf_gain
from crawlerlab.cli import main
from crawlerlab.params import load_groups

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    base = json.loads((ROOT / "fixtures" / "strict_window.json").read_text())
    pi_s_H = hopf_gain(load_groups(ROOT / "fixtures" / "strict_window.json"))
    base["sweep"] = {"param": "pi_s", "start": 0.5 * pi_s_H,
                     "stop": 1.4 * pi_s_H, "count": 19}
    base["workers"] = 4
    with tempfile.NamedTemporaryFile("w", suffix=".json",
                                     delete=False) as fh:
        json.dump(base, fh)
        cfg = fh.name
    sys.exit(main([
        "sweep", "--config", cfg,
        "--out", str(ROOT / "out" / "regime_scan"),
    ]))
