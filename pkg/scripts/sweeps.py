"""Coarse 13 x 8 sweeps: peak efficiency over (xi, g), retained ergotropy over (xi, tau_s)."""
from qbattery.runner import io
from qbattery.runner.config import load_config
from qbattery.runner.sweep import sweep2d

from _common import CONFIGS, outdir, parser


def main():
    p = parser(__doc__)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--only", choices=["charging", "storage"], help="run a single sweep")
    args = p.parse_args()
    out = outdir(args)
    for panel in ("charging", "storage"):
        if args.only and panel != args.only:
            continue
        cfg = load_config(CONFIGS / f"sweep_{panel}.toml")
        result = sweep2d(cfg, workers=args.workers)
        io.write_sweep_csv(result, out / f"sweep_{panel}.csv")
        if args.plot:
            io.plot_sweep(result, out / f"sweep_{panel}.svg")
        g = result.grid
        print(f"sweep_{panel}: {result.n_failed} failed cells; argmax {g.axis1.name} per {g.axis2.name}:")
        for v2, v1 in zip(g.axis2.values, result.argmax_axis1()):
            print(f"  {g.axis2.name} = {v2:.4g}: {g.axis1.name} = {v1:.4g}")


if __name__ == "__main__":
    main()
