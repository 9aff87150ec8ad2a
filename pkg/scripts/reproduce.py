#!/usr/bin/env python3
"""Run the synthetic experiment specs and write curve CSVs under results/.

    python3 scripts/reproduce.py                 # every synthetic spec
    python3 scripts/reproduce.py fig2 table3_sbm_m3  # specs whose name starts with these
    python3 scripts/reproduce.py --quick          # 2 repetitions, 3 restarts

Real-network specs (regime = dataset) run only when their data directory exists.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

from gnan.experiments import load_spec, run_benchmark, write_benchmark

ROOT = Path(__file__).resolve().parents[1]
log = logging.getLogger("reproduce")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("prefixes", nargs="*", help="spec name prefixes (default: all)")
    ap.add_argument("--specs", type=Path, default=ROOT / "specs")
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    overrides = {"repetitions": "2", "restarts": "3"} if args.quick else {}
    paths = sorted(args.specs.glob("*.spec"))
    if args.prefixes:
        paths = [p for p in paths if any(p.stem.startswith(x) for x in args.prefixes)]
    for path in paths:
        spec = load_spec(path, overrides)
        if spec.regime == "dataset" and not (Path(spec.dataset) / "edges.tsv").is_file():
            log.info("skip %s: %s not found", spec.name, spec.dataset)
            continue
        t0 = time.perf_counter()
        res = run_benchmark(spec, args.seed, n_workers=args.threads)
        write_benchmark(res, args.out / spec.name)
        ps = [None] if spec.regime == "dataset" else spec.p_strong
        for p in ps:
            for mode in spec.modes:
                pts = " ".join(f"{m:.4f}+-{s:.4f}" for _, m, s in res.curve(p, mode))
                log.info("%s %s%s: %s", spec.name, "" if p is None else f"p={p:g} ",
                         mode.value, pts)
        log.info("%s done in %.0fs", spec.name, time.perf_counter() - t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
