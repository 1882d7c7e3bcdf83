"""Lab-frame charging at the first J0 zero converges to the TC result as nu grows."""
from qbattery.runner.config import load_config
from qbattery.runner.experiments import run_charging

from _common import CONFIGS, outdir, parser

CUTOFFS = {5.0: 48, 10.0: 32, 50.0: 16}


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args)
    tc = run_charging(load_config(CONFIGS / "lab_frame.toml", ['system.variant="tc"', "system.n_max=16"]))
    lines = ["nu,peak_efficiency,error_vs_tc"]
    for nu, n_max in CUTOFFS.items():
        rec = run_charging(load_config(CONFIGS / "lab_frame.toml", [f"modulation.nu={nu}", f"system.n_max={n_max}"]))
        err = abs(rec.peak.value - tc.peak.value)
        lines.append(f"{nu:g},{rec.peak.value:.12g},{err:.12g}")
        print(f"nu = {nu:g}: peak efficiency {rec.peak.value:.4f}, error vs TC {err:.4f}")
    (out / "lab_frame_convergence.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
