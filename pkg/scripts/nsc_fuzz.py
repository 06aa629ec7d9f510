"""Fuzz the optimality battery: optimal IVs must pass, perturbed IVs must fail."""

from __future__ import annotations

import argparse
import time

import numpy as np

from bb84opt.linalg import haar_random_unitary
from bb84opt.optimality import nsc_battery, perturb_ivs
from bb84opt.states import Basis, ErrorRates, MeasurementSetup, optimal_ivs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=100)
    ap.add_argument("--setups", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    worst, escaped, total = 0.0, 0, 0
    for i in range(args.pairs):
        r = ErrorRates(*rng.uniform(0.01, 0.49, 2))
        for k in range(args.setups):
            seed = int(rng.integers(2**32))
            e = MeasurementSetup(haar_random_unitary(4, seed))
            ivs = optimal_ivs(Basis.COMPUTATIONAL, r, e)
            worst = max(worst, nsc_battery(ivs, e, r).max_residual)
            bad = nsc_battery(perturb_ivs(ivs, rng.uniform(0.05, 0.5), seed), e, r)
            escaped += any(bad.condition_passed(key) for key in bad.per_condition)
            total += 1
    print(f"{total} setups in {time.perf_counter() - t0:.2f}s")
    print(f"worst residual on optimal IVs: {worst:.2e}")
    print(f"perturbed sets with any passing check: {escaped}")


if __name__ == "__main__":
    main()
