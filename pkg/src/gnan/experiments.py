"""Declarative experiment specs and the generate/fit/evaluate sweep driver.

A spec is a ``key = value`` text file; lists are comma separated and a
mixture network is written ``omega1/omega2/omega3/omega4``::

    regime = community
    sizes = 80, 100, 120, 200
    lambda = 0.02
    omega = 0.02, 0.04, 0.06, 0.08, 0.10
    p_strong = 0.3, 0.5, 0.7, 0.9
    modes = both, links, attrs
    repetitions = 10
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .em import FitConfig, fit
from .evaluation import hard_assign, nmi
from .model import Mode
from .synthetic import (BlockMatrix, DependencyMatrix, attr_sample, dependency_design,
                        noisy_attribute_design, planted_community, planted_disassortative,
                        planted_mixture, sbm_sample)

REGIMES = ("community", "disassortative", "mixture", "core-periphery", "dataset")


@dataclass(frozen=True)
class ExperimentSpec:
    regime: str
    sweep: tuple = ()                 # omega | lambda1 | (w1, w2, w3, w4) per point
    lam: float = 0.02
    sizes: tuple = ()
    p_strong: tuple = (0.9,)
    p_noise: float = 0.1
    strong_per_block: int = 10
    extra_noise: int = 0
    attr_design: str = "blocks"       # blocks | noisy (four-community shared layout)
    repetitions: int = 10
    modes: tuple = (Mode.BOTH,)
    communities: int = 0              # 0: number of planted blocks
    max_iters: int = 500
    tolerance: float = 1e-6
    jitter: float = 0.1
    restarts: int = 10
    dataset: str = ""
    name: str = ""

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}; expected one of {REGIMES}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.modes:
            raise ValueError("at least one mode is required")
        object.__setattr__(self, "modes", tuple(Mode.parse(m) for m in self.modes))
        if self.regime == "dataset":
            if not self.dataset:
                raise ValueError("dataset regime needs a dataset path")
            return
        if not self.sweep:
            raise ValueError("empty sweep")
        if not self.p_strong:
            raise ValueError("p_strong list is empty")
        for x in self.sweep:
            self.blocks(x)          # validates every sweep point
        for p in self.p_strong:
            self.dependencies(p)
        if len(self.sizes) != self.n_blocks:
            raise ValueError(f"{len(self.sizes)} block sizes for {self.n_blocks} blocks")

    @property
    def n_blocks(self) -> int:
        return {"community": len(self.sizes) or 4, "disassortative": 3,
                "mixture": 5, "core-periphery": 5, "dataset": 0}[self.regime]

    @property
    def n_communities(self) -> int:
        return self.communities or self.n_blocks

    def x_values(self) -> list:
        if self.regime in ("mixture", "core-periphery"):
            return [float(i + 1) for i in range(len(self.sweep))]
        return [float(x) for x in self.sweep]

    def blocks(self, x) -> BlockMatrix:
        if self.regime == "community":
            return planted_community(self.n_blocks, float(x), self.lam)
        if self.regime == "disassortative":
            return planted_disassortative(float(x))
        w = tuple(x)
        if len(w) != 4:
            raise ValueError(f"mixture network needs 4 omegas, got {w}")
        return planted_mixture(*w, self.lam)

    def dependencies(self, p_strong) -> DependencyMatrix:
        if self.attr_design == "noisy":
            if self.n_blocks != 4:
                raise ValueError("the noisy attribute design has four communities")
            return noisy_attribute_design()
        if self.attr_design != "blocks":
            raise ValueError(f"unknown attribute design {self.attr_design!r}")
        return dependency_design(self.n_blocks, self.strong_per_block, p_strong,
                                 self.p_noise, self.extra_noise)

    def fit_config(self, mode, seed: int, n_communities: int | None = None) -> FitConfig:
        """``n_communities`` is used only when the spec leaves it open."""
        c = self.communities or n_communities or self.n_blocks
        return FitConfig(c, self.max_iters, self.tolerance, self.jitter,
                         self.restarts, seed, mode)


_LIST_KEYS = {"sizes": int, "p_strong": float, "modes": str}
_SCALAR_KEYS = {"lambda": ("lam", float), "p_noise": ("p_noise", float),
                "strong_per_block": ("strong_per_block", int),
                "extra_noise": ("extra_noise", int), "attr_design": ("attr_design", str),
                "repetitions": ("repetitions", int), "communities": ("communities", int),
                "max_iters": ("max_iters", int), "tol": ("tolerance", float),
                "jitter": ("jitter", float), "restarts": ("restarts", int),
                "dataset": ("dataset", str), "name": ("name", str), "regime": ("regime", str)}
_SWEEP_KEYS = ("omega", "lambda1", "networks")


def parse_spec_text(text: str, overrides: dict | None = None) -> ExperimentSpec:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key = value")
        raw[key.strip()] = value.strip()
    raw.update(overrides or {})
    kw = {}
    for key, value in raw.items():
        items = [v.strip() for v in value.split(",") if v.strip()]
        if key in _LIST_KEYS:
            kw[key] = tuple(_LIST_KEYS[key](v) for v in items)
        elif key in _SCALAR_KEYS:
            name, conv = _SCALAR_KEYS[key]
            kw[name] = conv(value)
        elif key in _SWEEP_KEYS:
            if key == "networks":
                kw["sweep"] = tuple(tuple(float(w) for w in v.split("/")) for v in items)
            else:
                kw["sweep"] = tuple(float(v) for v in items)
        else:
            raise ValueError(f"unknown spec key {key!r}")
    if "regime" not in kw:
        raise ValueError("spec must name a regime")
    return ExperimentSpec(**kw)


def load_spec(path, overrides: dict | None = None) -> ExperimentSpec:
    spec = parse_spec_text(Path(path).read_text(), overrides)
    if spec.regime == "dataset" and not Path(spec.dataset).is_absolute():
        spec = dataclasses.replace(spec, dataset=str(Path(path).parent / spec.dataset))
    if not spec.name:
        spec = dataclasses.replace(spec, name=Path(path).stem)
    return spec


def _job_seed(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, *key])


def sample_dataset(spec: ExperimentSpec, ix: int, ip: int, rep: int, seed: int) -> io.Dataset:
    """Dataset for one (sweep point, p_strong, repetition); shared by every mode."""
    ss = _job_seed(seed, ix, ip, rep)
    rng = np.random.default_rng(ss)
    blocks = spec.blocks(spec.sweep[ix])
    deps = spec.dependencies(spec.p_strong[ip])
    graph, labels = sbm_sample(spec.sizes, blocks, rng)
    attrs = attr_sample(spec.sizes, deps, rng)
    name = f"{spec.regime}_x{spec.x_values()[ix]:g}_p{spec.p_strong[ip]:g}_r{rep}"
    return io.Dataset(graph, attrs, labels, name)


def generate(spec: ExperimentSpec, out_dir, seed: int) -> list[Path]:
    """Write every (sweep point, p_strong, repetition) dataset plus its planted matrices."""
    if spec.regime == "dataset":
        raise ValueError("the dataset regime has nothing to generate")
    out = Path(out_dir)
    written = []
    for ix in range(len(spec.sweep)):
        for ip in range(len(spec.p_strong)):
            for rep in range(spec.repetitions):
                ds = sample_dataset(spec, ix, ip, rep, seed)
                d = io.save_dataset(ds, out / ds.name)
                io.save_matrix(spec.blocks(spec.sweep[ix]).probs, d / "blocks.tsv")
                io.save_matrix(spec.dependencies(spec.p_strong[ip]).probs, d / "deps.tsv")
                written.append(d)
    return written


@dataclass(frozen=True)
class RunRecord:
    x: float
    p_strong: float
    mode: Mode
    rep: int
    nmi: float
    bound: float
    iterations: int
    converged: bool


@dataclass
class BenchmarkResult:
    spec: ExperimentSpec
    runs: list = field(default_factory=list)

    def curve(self, p_strong: float | None, mode: Mode) -> list:
        """(x, mean NMI, sample stddev) per sweep point; ``p_strong=None`` pools all runs."""
        out = []
        xs = [0.0] if self.spec.regime == "dataset" else self.spec.x_values()
        for x in xs:
            v = [r.nmi for r in self.runs if r.x == x and r.mode == mode
                 and (p_strong is None or r.p_strong == p_strong)]
            out.append((x, float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0))
        return out


def run_job(spec: ExperimentSpec, key, seed: int) -> RunRecord:
    """Fit and score one (sweep point, p_strong, mode, repetition) job."""
    ix, ip, mi, rep = key
    mode = spec.modes[mi]
    if spec.regime == "dataset":
        ds = io.load_dataset(spec.dataset)
        if ds.labels is None:
            raise ValueError(f"{spec.dataset} has no labels to evaluate against")
        x, p = 0.0, float("nan")
    else:
        ds = sample_dataset(spec, ix, ip, rep, seed)
        x, p = spec.x_values()[ix], spec.p_strong[ip]
    fit_seed = int(_job_seed(seed, ix, ip, rep, 1).generate_state(1, np.uint64)[0])
    res = fit(ds.graph, ds.attrs, spec.fit_config(mode, fit_seed, ds.labels.n_communities))
    score = nmi(ds.labels, hard_assign(res.params.membership))
    return RunRecord(x, p, mode, rep, score, res.final_bound, res.iterations_used, res.converged)


def run_benchmark(spec: ExperimentSpec, seed: int, n_workers: int = 1) -> BenchmarkResult:
    """Generate, fit and score every sweep point x p_strong x mode x repetition."""
    if spec.regime == "dataset":
        keys = [(0, 0, mi, rep) for mi in range(len(spec.modes))
                for rep in range(spec.repetitions)]
    else:
        keys = [(ix, ip, mi, rep) for ix in range(len(spec.sweep))
                for ip in range(len(spec.p_strong)) for mi in range(len(spec.modes))
                for rep in range(spec.repetitions)]
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            records = dict(zip(keys, pool.map(lambda k: run_job(spec, k, seed), keys)))
    else:
        records = {k: run_job(spec, k, seed) for k in keys}
    return BenchmarkResult(spec, [records[k] for k in sorted(records)])


def write_benchmark(result: BenchmarkResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = result.spec
    paths = []
    ps = [None] if spec.regime == "dataset" else list(spec.p_strong)
    for p in ps:
        for mode in spec.modes:
            tag = "" if p is None else f"_p{p:g}"
            path = out / f"curve{tag}_{mode.value}.csv"
            io.emit_curve(result.curve(p, mode), path)
            paths.append(path)
    runs = out / "runs.csv"
    with open(runs, "w") as fh:
        fh.write("x,p_strong,mode,rep,nmi,bound,iterations,converged\n")
        for r in result.runs:
            fh.write(f"{r.x:.17g},{r.p_strong:.17g},{r.mode.value},{r.rep},{r.nmi:.17g},"
                     f"{r.bound:.17g},{r.iterations},{int(r.converged)}\n")
    paths.append(runs)
    return paths
