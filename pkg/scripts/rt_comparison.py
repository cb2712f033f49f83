#!/usr/bin/env python3
"""Stable- versus violated-sign interface runs under identical forcing.

Runs the rt-run scenario with pressure-slope jumps +0.5 and -0.5 and prints
the sup-t energy J of each together with their ratio.  The violated-sign
growth probe is exploratory: it has no pass/fail meaning.
"""

import sys
from pathlib import Path

from contact_stab.config import parse_config
from contact_stab.scenarios import run_rt

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    results = {}
    for name in ("rt_stable", "rt_violated"):
        cfg = parse_config(str(ROOT / "configs" / f"{name}.cfg"), "rt-run")
        res = run_rt(cfg)
        if res.exit_code:
            print(f"{name}: failed (exit {res.exit_code})")
            return res.exit_code
        results[name] = res.data["J_max"]
        print(f"{name}: sup_t J = {res.data['J_max']:.6e}  "
              f"normalized ratio = {res.data['ratio']:.6e}")
    print(f"violated / stable J ratio: "
          f"{results['rt_violated'] / results['rt_stable']:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
