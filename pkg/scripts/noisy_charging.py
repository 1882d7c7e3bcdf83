"""Closed versus dissipative charging (collective decay at Gamma0 = 0.1)."""
from qbattery.runner import io
from qbattery.runner.config import load_config
from qbattery.runner.experiments import run_charging, run_noisy_charging

from _common import CONFIGS, outdir, parser


def main():
    p = parser(__doc__)
    p.add_argument("--N", type=int, default=8, help="number of cells (N = 8 takes minutes)")
    args = p.parse_args()
    out = outdir(args)
    cfg = load_config(CONFIGS / "noisy_charging.toml", [f"system.N={args.N}"])
    closed = run_charging(cfg.with_values(channel__kind="none", channel__gamma0=None))
    noisy = run_noisy_charging(cfg)
    for name, rec in (("closed", closed), ("noisy", noisy)):
        io.write_trajectory_csv(rec, out / f"noisy_charging_{name}.csv")
        io.write_json(rec.summary(), out / f"noisy_charging_{name}.json")
        if args.plot:
            io.plot_trajectory(rec, out / f"noisy_charging_{name}.svg")
        print(f"{name}: peak efficiency {rec.peak.value:.4f} at t = {rec.peak.t:.4f}")


if __name__ == "__main__":
    main()
