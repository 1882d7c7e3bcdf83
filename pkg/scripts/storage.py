"""Storage under dephasing (|phi1>, |phi2>) and engineered dissipation (xi = 0, 1.5, 2.404)."""
from qbattery.runner import io
from qbattery.runner.config import load_config
from qbattery.runner.experiments import run_storage

from _common import CONFIGS, outdir, parser

RUNS = {
    "dephasing_phi1": ("storage_dephasing.toml", []),
    "dephasing_phi2": ("storage_dephasing.toml", ['system.initial="dicke"', "system.dicke_m_index=4"]),
    "dissipation_xi0": ("storage_dissipation.toml", ["modulation.xi=0.0"]),
    "dissipation_xi1p5": ("storage_dissipation.toml", ["modulation.xi=1.5"]),
    "dissipation_xi2p404": ("storage_dissipation.toml", ["modulation.xi=2.404"]),
}


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args)
    for name, (config, overrides) in RUNS.items():
        rec = run_storage(load_config(CONFIGS / config, overrides))
        io.write_trajectory_csv(rec, out / f"storage_{name}.csv")
        io.write_json(rec.summary(), out / f"storage_{name}.json")
        if args.plot:
            io.plot_trajectory(rec, out / f"storage_{name}.svg")
        erg = rec.column("ergotropy") / rec.n_cells
        print(f"{name}: ergotropy per cell {erg[0]:.4f} -> {erg[-1]:.3e} at t = {rec.column('t')[-1]:g}")


if __name__ == "__main__":
    main()
