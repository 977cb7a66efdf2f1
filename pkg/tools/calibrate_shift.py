"""Pre-run that fixes the conditioning thresholds used by the acceptance suite.

Runs the shift and C[0,1] sweeps at n = 10, 20, 40, 80 and writes the observed
values, plus the thresholds derived from them, to tests/data/shift_calibration.json.
Re-run only when the example constructions change.
"""

import argparse
import json
import math
from pathlib import Path

from seppairs.examples import run_sweep

N_VALUES = [10, 20, 40, 80]


def calibrate() -> dict:
    shift = run_sweep("shift", N_VALUES)
    ct = run_sweep("ct", N_VALUES)
    c0_max = max(shift.c0_values)
    s = shift.sigma_min_values
    return {
        "n_values": N_VALUES,
        "shift": {
            "c0_observed": shift.c0_values,
            "sigma_min_observed": s,
            # observed maximum rounded up at the third decimal
            "c0_bound": math.ceil(c0_max * 1000 + 1) / 1000,
            "sigma_ratio_observed": s[-1] / s[0],
            "sigma_ratio_max": 0.5,
        },
        "ct": {
            "sigma_min_observed": ct.sigma_min_values,
            "sigma_ratio_observed": ct.sigma_min_values[-1] / ct.sigma_min_values[0],
        },
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "data" / "shift_calibration.json"))
    args = ap.parse_args()
    data = calibrate()
    Path(args.out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
