"""Seeded simulation studies over the built-in scenarios.

Four studies are provided:

* density  -- pooled leverage / cross-leverage samples per ground-truth
  class (main effect, 2-way, ... , irrelevant) with kernel-density curves.
* success  -- histograms of how many of the relevant variables a top-k
  selection captures, per criterion.
* combo    -- a 10 x 10 grid of union-mode combined selections over
  percentages {0, 10, ..., 90} of columns picked by cross-leverage and by
  leverage, scored by the mean fraction of relevant variables captured.
* pipeline -- reduce-then-fit: shrink the data with each criterion, fit a
  bootstrap ensemble of logic models on the reduced columns and report
  which ground-truth terms are recovered exactly.

Replicate r draws its data from the derived seed ``seed ^ r``; workers
aggregate by sums and counts, so results are identical for any worker
count.  Studies write their tables to ``config.output_dir`` when set.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .logic import AnnealParams, ensemble_fit, positive_term, term_to_string
from .scores import compute_scores
from .selection import (
    SelectionSpec,
    rank_order,
    ranking_keys,
    sample_size,
    select,
    select_combined,
)
from .simulate import ScenarioSpec, builtin_scenario, generate, replicate_seed
from .stats import kde, kde_grid
from . import report

GRID_PERCENTS = tuple(range(0, 100, 10))
DEFAULT_CRITERIA = ("cls", "ls", "cor", "pval")
PIPELINE_METHODS = ("none", "ls", "cls", "cor", "pval", "combined")


@dataclass
class ExperimentConfig:
    scenario: int = 1
    n: int = 60
    p: int = 1000
    replicates: int = 500  # desk scale; raise to 10_000 for full-scale runs
    k: int | None = None  # None resolves to sample_size(n)
    criteria: tuple = DEFAULT_CRITERIA
    seed: int = 0
    output_dir: str | None = None
    calibration: str = "per-term"

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        resolved = self.k if self.k is not None else sample_size(self.n)
        if resolved > self.p:
            raise ValueError(f"k={resolved} exceeds p={self.p}")
        for c in self.criteria:
            if c not in DEFAULT_CRITERIA:
                raise ValueError(f"unknown criterion {c!r}")

    @property
    def resolved_k(self) -> int:
        return self.k if self.k is not None else sample_size(self.n)

    def scenario_spec(self) -> ScenarioSpec:
        return builtin_scenario(
            self.scenario, self.n, self.p, seed=self.seed, calibration=self.calibration
        )

    def as_fields(self) -> dict:
        d = {
            "scenario": self.scenario,
            "n": self.n,
            "p": self.p,
            "replicates": self.replicates,
            "k": self.resolved_k,
            "criteria": ",".join(self.criteria),
            "seed": self.seed,
            "calibration": self.calibration,
        }
        return d


@dataclass
class SuccessHistogram:
    criterion: str
    counts: np.ndarray  # counts[c] = replicates capturing exactly c relevant variables
    mean_captured: float

    @property
    def replicates(self) -> int:
        return int(self.counts.sum())

    def at_least(self, c: int) -> float:
        """Fraction of replicates capturing at least c relevant variables."""
        return float(self.counts[c:].sum() / self.counts.sum())


@dataclass
class DensityStudyResult:
    classes: list  # class labels, highest interaction order first
    samples: dict  # (score_type, class) -> pooled score samples
    curves: dict  # (score_type, class) -> (grid, density)


@dataclass
class ComboGrid:
    percents: tuple  # row/column percent labels
    proportions: np.ndarray  # [ls_row, cls_col] mean fraction captured
    proportions_se: np.ndarray  # standard error of each cell mean

    def cell(self, pct_cls: int, pct_ls: int) -> float:
        i = self.percents.index(pct_ls)
        j = self.percents.index(pct_cls)
        return float(self.proportions[i, j])

    def cell_se(self, pct_cls: int, pct_ls: int) -> float:
        i = self.percents.index(pct_ls)
        j = self.percents.index(pct_cls)
        return float(self.proportions_se[i, j])


@dataclass
class PipelineMethodReport:
    method: str
    wall_time: float  # seconds spent in ensemble fitting
    kept_truth: float  # mean fraction of relevant variables surviving reduction
    term_recovery: dict  # ground-truth term -> mean exact-term frequency
    term_found: dict  # ground-truth term -> fraction of replicates with freq > 0
    variable_recovery: dict  # relevant column -> mean inclusion frequency


def variable_classes(spec: ScenarioSpec) -> tuple[list, np.ndarray]:
    """Class label per column: '<s>-way' / 'main' for term members, else 'irrelevant'."""
    labels = np.array(["irrelevant"] * spec.p, dtype=object)
    for term in spec.dnf:
        name = "main" if len(term) == 1 else f"{len(term)}-way"
        for v in term:
            labels[v] = name
    sizes = sorted({len(t) for t in spec.dnf}, reverse=True)
    classes = [("main" if s == 1 else f"{s}-way") for s in sizes] + ["irrelevant"]
    return classes, labels


# ---------------------------------------------------------------------------
# replicate workers (top level so process pools can pickle them)

def _replicate_dataset(config: ExperimentConfig, rep: int) -> tuple[ScenarioSpec, Dataset]:
    spec = config.scenario_spec()
    return spec, generate(spec, seed=replicate_seed(config.seed, rep))


def _density_replicate(args):
    config, rep = args
    _, ds = _replicate_dataset(config, rep)
    s = compute_scores(ds)
    return s.leverage, s.cross_leverage


def _success_replicate(args):
    config, rep = args
    spec, ds = _replicate_dataset(config, rep)
    scores = compute_scores(ds)
    truth = spec.relevant
    out = []
    for crit in config.criteria:
        sel = select(ds, SelectionSpec(criterion=crit, k=config.resolved_k), scores=scores)
        out.append(int(np.intersect1d(sel.indices, truth).size))
    return out


def _combo_replicate(args):
    config, rep = args
    spec, ds = _replicate_dataset(config, rep)
    scores = compute_scores(ds)
    sel_spec = SelectionSpec(criterion="cls")
    cls_pos = np.empty(config.p, dtype=int)
    cls_pos[rank_order(ranking_keys(ds, "cls", sel_spec, scores))] = np.arange(config.p)
    ls_pos = np.empty(config.p, dtype=int)
    ls_pos[rank_order(ranking_keys(ds, "ls", sel_spec, scores))] = np.arange(config.p)
    truth = spec.relevant
    pc, pl = cls_pos[truth], ls_pos[truth]
    grid = np.zeros((len(GRID_PERCENTS), len(GRID_PERCENTS)))
    for i, pct_ls in enumerate(GRID_PERCENTS):
        n_ls = int(np.ceil(pct_ls / 100.0 * config.p))
        for j, pct_cls in enumerate(GRID_PERCENTS):
            n_cls = int(np.ceil(pct_cls / 100.0 * config.p))
            grid[i, j] = ((pc < n_cls) | (pl < n_ls)).mean()
    return grid


def _pmap(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, len(tasks) // (jobs * 8))
        return list(pool.map(fn, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# studies

def run_density_study(config: ExperimentConfig, jobs: int = 1) -> DensityStudyResult:
    """Pool leverage / cross-leverage samples by ground-truth class."""
    spec = config.scenario_spec()
    classes, labels = variable_classes(spec)
    tasks = [(config, rep) for rep in range(config.replicates)]
    parts = _pmap(_density_replicate, tasks, jobs)
    lev = np.concatenate([part[0] for part in parts])
    cls = np.concatenate([part[1] for part in parts])
    tiled = np.tile(labels, config.replicates)
    samples: dict = {}
    curves: dict = {}
    for score_type, values in (("ls", lev), ("cls", cls)):
        for cname in classes:
            v = values[tiled == cname]
            samples[(score_type, cname)] = v
            grid = kde_grid(v)
            curves[(score_type, cname)] = (grid, kde(v, grid))
    result = DensityStudyResult(classes=classes, samples=samples, curves=curves)
    if config.output_dir is not None:
        write_density(result, config)
    return result


def run_success_study(config: ExperimentConfig, jobs: int = 1) -> dict:
    """Capture histograms per criterion at the configured subset size."""
    tasks = [(config, rep) for rep in range(config.replicates)]
    parts = _pmap(_success_replicate, tasks, jobs)
    n_truth = config.scenario_spec().relevant.size
    out = {}
    for idx, crit in enumerate(config.criteria):
        captured = np.array([part[idx] for part in parts])
        counts = np.bincount(captured, minlength=n_truth + 1)
        out[crit] = SuccessHistogram(
            criterion=crit, counts=counts, mean_captured=float(captured.mean())
        )
    if config.output_dir is not None:
        write_success(out, config)
    return out


def run_combo_grid(config: ExperimentConfig, jobs: int = 1) -> ComboGrid:
    """Union-mode combination grid over cross-leverage / leverage percentages."""
    tasks = [(config, rep) for rep in range(config.replicates)]
    parts = np.asarray(_pmap(_combo_replicate, tasks, jobs))
    se = (
        parts.std(axis=0, ddof=1) / np.sqrt(len(parts))
        if len(parts) > 1
        else np.zeros_like(parts[0])
    )
    grid = ComboGrid(
        percents=GRID_PERCENTS,
        proportions=parts.mean(axis=0),
        proportions_se=se,
    )
    if config.output_dir is not None:
        write_combo(grid, config)
    return grid


def _reduce_indices(ds: Dataset, method: str, k: int, sequential_pct_ls: float):
    if method == "none":
        return np.arange(ds.p)
    if method == "combined":
        return select_combined(
            ds, pct_cls=0.0, pct_ls=sequential_pct_ls, mode="sequential", k=k
        ).indices
    return select(ds, SelectionSpec(criterion=method, k=k)).indices


def _pipeline_replicate(args):
    config, rep, methods, params, b_boot, sequential_pct_ls = args
    spec, ds = _replicate_dataset(config, rep)
    truth = spec.relevant
    truth_terms = [positive_term(t) for t in spec.dnf]
    k = config.resolved_k
    rep_params = replace(params, seed=params.seed ^ (rep << 16))
    out = {}
    for method in methods:
        idx = _reduce_indices(ds, method, k, sequential_pct_ls)
        sub = ds.subset(idx)
        t0 = time.perf_counter()
        imp = ensemble_fit(sub, rep_params, b_boot)
        elapsed = time.perf_counter() - t0
        var_freq = np.zeros(ds.p)
        var_freq[idx] = imp.variable_frequency
        term_freq = {}
        for term, freq in imp.term_frequency.items():
            mapped = tuple(sorted((int(idx[v]), neg) for v, neg in term))
            term_freq[mapped] = term_freq.get(mapped, 0.0) + freq
        out[method] = {
            "wall_time": elapsed,
            "kept": np.intersect1d(idx, truth).size / truth.size,
            "terms": {t: term_freq.get(t, 0.0) for t in truth_terms},
            "vars": {int(v): float(var_freq[v]) for v in truth},
        }
    return out


def run_pipeline_study(
    config: ExperimentConfig,
    anneal: AnnealParams | None = None,
    b_boot: int = 20,
    methods: tuple = PIPELINE_METHODS,
    sequential_pct_ls: float = 0.1,
    jobs: int = 1,
) -> dict:
    """Reduce-then-fit comparison across selection methods.

    Every method reduces each replicate's data to ``config.resolved_k``
    columns ("none" keeps all p), fits a ``b_boot``-fold bootstrap ensemble
    of logic models with the same iteration budget, and reports exact
    recovery of the scenario's ground-truth terms in the original column
    indices.  The combined method takes the lowest-leverage
    ``sequential_pct_ls * p`` columns first and fills up to k by
    cross-leverage.
    """
    anneal = anneal or AnnealParams(seed=config.seed)
    spec = config.scenario_spec()
    truth_terms = [positive_term(t) for t in spec.dnf]
    tasks = [
        (config, rep, tuple(methods), anneal, b_boot, sequential_pct_ls)
        for rep in range(config.replicates)
    ]
    parts = _pmap(_pipeline_replicate, tasks, jobs)
    reports = {}
    for method in methods:
        per = [part[method] for part in parts]
        term_recovery = {
            t: float(np.mean([x["terms"][t] for x in per])) for t in truth_terms
        }
        term_found = {
            t: float(np.mean([x["terms"][t] > 0.0 for x in per])) for t in truth_terms
        }
        var_recovery = {
            int(v): float(np.mean([x["vars"][int(v)] for x in per]))
            for v in spec.relevant
        }
        reports[method] = PipelineMethodReport(
            method=method,
            wall_time=float(np.sum([x["wall_time"] for x in per])),
            kept_truth=float(np.mean([x["kept"] for x in per])),
            term_recovery=term_recovery,
            term_found=term_found,
            variable_recovery=var_recovery,
        )
    if config.output_dir is not None:
        write_pipeline(reports, config)
    return reports


# ---------------------------------------------------------------------------
# table export

def _outdir(config: ExperimentConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_density(result: DensityStudyResult, config: ExperimentConfig) -> list:
    out = _outdir(config)
    fields = config.as_fields()
    sample_rows = (
        (score_type, cname, float(v))
        for (score_type, cname), values in sorted(result.samples.items())
        for v in values
    )
    paths = [
        report.write_table(
            out / "density_samples.tsv", ["score", "class", "value"], sample_rows, fields
        )
    ]
    curve_rows = (
        (score_type, cname, float(g), float(d))
        for (score_type, cname), (grid, dens) in sorted(result.curves.items())
        for g, d in zip(grid, dens)
    )
    paths.append(
        report.write_table(
            out / "density_curves.tsv",
            ["score", "class", "grid", "density"],
            curve_rows,
            fields,
        )
    )
    return paths


def write_success(histograms: dict, config: ExperimentConfig) -> Path:
    rows = [
        (crit, c, int(h.counts[c]))
        for crit, h in histograms.items()
        for c in range(h.counts.size)
    ]
    extra = [
        f"mean_captured[{crit}] = {h.mean_captured:.6f}" for crit, h in histograms.items()
    ]
    return report.write_table(
        _outdir(config) / "success_histograms.tsv",
        ["criterion", "captured", "count"],
        rows,
        config.as_fields(),
        extra,
    )


def write_combo(grid: ComboGrid, config: ExperimentConfig) -> Path:
    columns = ["pct_ls"] + [f"cls_{p}" for p in grid.percents]
    rows = [
        [pct_ls] + [float(v) for v in grid.proportions[i]]
        for i, pct_ls in enumerate(grid.percents)
    ]
    return report.write_table(
        _outdir(config) / "combo_grid.tsv", columns, rows, config.as_fields()
    )


def write_pipeline(reports: dict, config: ExperimentConfig) -> Path:
    rows = []
    for method, rep in reports.items():
        for term, freq in rep.term_recovery.items():
            kind = "main" if len(term) == 1 else "interaction"
            rows.append(
                (method, term_to_string(term), kind, len(term), freq, rep.term_found[term])
            )
        for v, freq in rep.variable_recovery.items():
            rows.append((method, f"X{v + 1}", "variable", 1, freq, float(freq > 0.0)))
    extra = [
        f"wall_time[{m}] = {rep.wall_time:.3f}s kept_truth = {rep.kept_truth:.3f}"
        for m, rep in reports.items()
    ]
    return report.write_table(
        _outdir(config) / "pipeline_recovery.tsv",
        ["method", "target", "kind", "order", "mean_frequency", "found_fraction"],
        rows,
        config.as_fields(),
        extra,
    )
