"""Command line driver: ``gnan {generate,fit,eval,benchmark,inspect}``.

Exit codes: 0 success, 1 usage or I/O error, 2 fit stopped at max iterations.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .em import FitConfig, fit
from .evaluation import hard_assign, modularity, nmi, top_attributes
from .experiments import generate, load_spec, run_benchmark, write_benchmark

log = logging.getLogger("gnan")

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _seed(value: str) -> int:
    v = int(value, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def cmd_generate(args) -> int:
    spec = load_spec(args.spec, _overrides(args.set))
    out = Path(args.out or "datasets")
    dirs = generate(spec, out, args.seed)
    for d in dirs:
        print(d)
    log.info("wrote %d dataset(s) under %s", len(dirs), out)
    return EXIT_OK


def cmd_fit(args) -> int:
    ds = io.load_dataset(args.dataset)
    c = args.communities
    if c is None:
        if ds.labels is None:
            raise ValueError("--communities is required when the dataset has no labels")
        c = ds.labels.n_communities
    config = FitConfig(c, args.max_iters, args.tol, args.jitter, args.restarts, args.seed,
                       args.mode)
    res = fit(ds.graph, ds.attrs, config, n_workers=args.threads)
    out = Path(args.out) if args.out else Path(args.dataset) / "fit.txt"
    if out.is_dir() or (args.out and not out.suffix):
        out.mkdir(parents=True, exist_ok=True)
        out = out / "fit.txt"
    io.save_fit(res, out)
    print(f"bound={res.final_bound:.10g} iterations={res.iterations_used} "
          f"converged={int(res.converged)} restart={res.restart_index} fit={out}")
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_eval(args) -> int:
    labels = io.load_labels(args.labels)
    graph = io.load_edge_list(args.graph) if args.graph else None
    src = Path(args.fit)
    fits = sorted(src.glob("**/*fit*.txt")) if src.is_dir() else [src]
    if not fits:
        raise FileNotFoundError(f"no fit files under {src}")
    scores, qs = [], []
    for f in fits:
        part = hard_assign(io.load_fit(f).params.membership)
        if part.n_nodes != labels.n_nodes:
            raise ValueError(f"{f} covers {part.n_nodes} nodes, labels cover {labels.n_nodes}")
        scores.append(nmi(labels, part))
        line = f"{f}\tnmi={scores[-1]:.4f}"
        if graph is not None:
            qs.append(modularity(graph, part))
            line += f"\tmodularity={qs[-1]:.4f}"
        print(line)
    if len(fits) > 1:
        sd = float(np.std(scores, ddof=1))
        print(f"nmi mean={np.mean(scores):.4f} stddev={sd:.4f} n={len(scores)}")
        if qs:
            print(f"modularity mean={np.mean(qs):.4f} stddev={float(np.std(qs, ddof=1)):.4f}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    spec = load_spec(args.spec, _overrides(args.set))
    out = Path(args.out or Path("results") / spec.name)
    res = run_benchmark(spec, args.seed, n_workers=args.threads)
    for path in write_benchmark(res, out):
        print(path)
    ps = [None] if spec.regime == "dataset" else spec.p_strong
    for p in ps:
        for mode in spec.modes:
            pts = " ".join(f"{x:g}:{m:.4f}" for x, m, _ in res.curve(p, mode))
            tag = "" if p is None else f"p={p:g} "
            log.info("%s%s %s", tag, mode.value, pts)
    return EXIT_OK


def cmd_inspect(args) -> int:
    res = io.load_fit(args.fit)
    names = None
    if args.names:
        names = [ln.strip() for ln in Path(args.names).read_text().splitlines() if ln.strip()]
        if len(names) != res.params.n_attrs:
            raise ValueError(f"{len(names)} names for {res.params.n_attrs} attributes")
    report = top_attributes(res.params.profile, args.threshold)
    print(report.format(names, top=args.top))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default=None, help="output directory or file")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="gnan", description="GNAN attributed-network structure detection")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="sample synthetic datasets")
    g.add_argument("spec")
    g.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a spec key")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", parents=[common], help="fit GNAN to a dataset directory")
    f.add_argument("dataset")
    f.add_argument("--communities", type=int)
    f.add_argument("--max-iters", type=int, default=500)
    f.add_argument("--tol", type=float, default=1e-6)
    f.add_argument("--jitter", type=float, default=0.1)
    f.add_argument("--restarts", type=int, default=10)
    f.add_argument("--mode", choices=["both", "links", "attrs"], default="both")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", parents=[common], help="score fits against labels")
    e.add_argument("fit", help="fit file or a directory of fit files")
    e.add_argument("labels")
    e.add_argument("--graph", help="edge list; adds modularity of the hard partition")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("benchmark", parents=[common], help="run an experiment sweep")
    b.add_argument("spec")
    b.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a spec key")
    b.set_defaults(func=cmd_benchmark)

    i = sub.add_parser("inspect", parents=[common], help="rank attributes per community")
    i.add_argument("fit")
    i.add_argument("--names", help="file with one attribute name per line")
    i.add_argument("--threshold", type=float, default=0.1)
    i.add_argument("--top", type=int, default=None)
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"gnan {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
