"""Regenerate the key-rate curves as CSV and, if matplotlib is installed, a PNG."""

from __future__ import annotations

import argparse
from pathlib import Path

from bb84opt import info


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.0025)
    ap.add_argument("--out", default="key_rate_curves")
    args = ap.parse_args()

    points = info.sweep(0.0, 0.25, args.step)
    csv_path = Path(args.out).with_suffix(".csv")
    csv_path.write_text(info.sweep_csv(points))
    print(f"wrote {csv_path} ({len(points)} rows), threshold {info.qber_threshold():.6f}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot")
        return

    d = [p.d for p in points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(d, [p.ig_star for p in points], label="IG*")
    ax.plot(d, [p.mi_ab for p in points], label="MI_AB")
    ax.plot(d, [p.mi_ae for p in points], label="MI_AE")
    ax.plot(d, [p.key_rate for p in points], label="key rate")
    ax.axvline(info.qber_threshold(), color="grey", ls=":", lw=1)
    ax.set_xlabel("D")
    ax.set_ylabel("bits per sifted photon")
    ax.legend()
    fig.tight_layout()
    png = Path(args.out).with_suffix(".png")
    fig.savefig(png, dpi=150)
    print(f"wrote {png}")


if __name__ == "__main__":
    main()
