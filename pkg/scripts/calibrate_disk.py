"""Fit the disk-graph constants on small instances and freeze them.

Writes ``tests/fixtures/disk_constants.json``.  Each constant is the largest
ratio seen on the calibration grid times a fixed headroom factor; the
acceptance test then checks the same ratios on larger instances.
"""

import argparse
import json
from pathlib import Path

from hamapsp.disk import disk_ratios, generate_dense_points

SIZES = (64, 100, 150)
RADII = (0.05, 0.1, 0.2)
SEEDS = range(5)
B = 4
HEADROOM = 1.5


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", default=str(Path(__file__).parents[1] / "tests/fixtures/disk_constants.json"))
    args = ap.parse_args()
    worst = {"lambda": 0.0, "kappa": 0.0, "mu": 0.0}
    for n in SIZES:
        for r in RADII:
            for seed in SEEDS:
                q = disk_ratios(generate_dense_points(n, B, r, seed))
                worst["lambda"] = max(worst["lambda"], q.mst_length)
                worst["kappa"] = max(worst["kappa"], q.edge)
                worst["mu"] = max(worst["mu"], q.row_tree)
    out = {
        "calibration": {"sizes": SIZES, "radii": RADII, "seeds": list(SEEDS), "b": B, "headroom": HEADROOM},
        "observed_max": worst,
        **{k: round(v * HEADROOM, 4) for k, v in worst.items()},
    }
    Path(args.output).write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
