"""Shared helpers for the reproduction scripts."""
from __future__ import annotations

import argparse
from pathlib import Path

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--outdir", default="results", help="directory for CSV/JSON/SVG output")
    p.add_argument("--plot", action="store_true", help="also write SVG figures (needs matplotlib)")
    return p


def outdir(args) -> Path:
    path = Path(args.outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path
