"""Charging efficiency and coherence for xi = 0, 0.8 and the first J0 zero."""
from qbattery.runner import io
from qbattery.runner.config import load_config
from qbattery.runner.experiments import run_charging

from _common import CONFIGS, outdir, parser

CASES = {"xi0": "0.0", "xi0p8": "0.8", "xi1p202": '"j0_zero:1"'}


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args)
    tc = run_charging(load_config(CONFIGS / "charging.toml", ['system.variant="tc"']))
    print(f"TC reference: peak efficiency {tc.peak.value:.6f} at t = {tc.peak.t:.4f}")
    for name, xi in CASES.items():
        cfg = load_config(CONFIGS / "charging.toml", [f"modulation.xi={xi}"])
        rec = run_charging(cfg)
        io.write_trajectory_csv(rec, out / f"charging_{name}.csv")
        io.write_json(rec.summary(), out / f"charging_{name}.json")
        if args.plot:
            io.plot_trajectory(rec, out / f"charging_{name}.svg")
        print(f"xi = {cfg.modulation.xi:.6f}: peak efficiency {rec.peak.value:.4f} at t = {rec.peak.t:.4f}, "
              f"max coherence {rec.column('coherence').max():.4f}")


if __name__ == "__main__":
    main()
