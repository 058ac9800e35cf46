"""Command-line front end.

Subcommands: scores, select, simulate, fit-logic, experiment, raster,
preprocess.  Every output file starts with comment lines echoing the tool
version and the fully resolved configuration, and identical invocations
produce byte-identical files.  An optional ``--config FILE`` supplies
``key = value`` defaults (keys are the long flag names); explicit flags
win over the file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, io
from .dataset import Dataset
from .logic import AnnealParams, anneal_fit, dnf_to_string, ensemble_fit, term_to_string, tree_to_string
from .report import write_lines, write_table
from .scores import compute_scores
from .selection import SelectionSpec, sample_size, select
from .simulate import ScenarioSpec, builtin_scenario, calibrate, dnf_from_text, generate
from .experiments import (
    ExperimentConfig,
    run_combo_grid,
    run_density_study,
    run_pipeline_study,
    run_success_study,
)


def _read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Fill argparse defaults from --config; explicit flags keep priority."""
    if not getattr(args, "config", None):
        return
    file_values = _read_config_file(args.config)
    given = {
        tok.split("=", 1)[0].lstrip("-").replace("-", "_")
        for tok in argv
        if tok.startswith("--")
    }
    for key, raw in file_values.items():
        if not hasattr(args, key) or key in given:
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, key, int(raw))
        elif isinstance(current, float):
            setattr(args, key, float(raw))
        else:
            setattr(args, key, raw)


def _config_echo(args: argparse.Namespace, keys: list[str]) -> dict:
    echo = {"command": args.command}
    for key in keys:
        echo[key] = getattr(args, key)
    return echo


def _load_dataset(args) -> Dataset:
    response = int(args.response) if _is_int(args.response) else args.response
    table = io.load_table(args.input, response)
    if table.missing_count:
        raise ValueError(
            f"{args.input} has {table.missing_count} missing cells; "
            "run the preprocess subcommand first"
        )
    return io.to_dataset(table)


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except (TypeError, ValueError):
        return False


def _resolve_k(args, n: int, parser) -> int:
    if args.k == "auto":
        return sample_size(n)
    if not _is_int(args.k):
        parser.error(f"--k must be an integer or 'auto', got {args.k!r}")
    return int(args.k)


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_scores(args, parser) -> int:
    ds = _load_dataset(args)
    s = compute_scores(ds)
    rows = [
        (j, name, float(s.leverage[j]), float(s.cross_leverage[j]))
        for j, name in enumerate(ds.names())
    ]
    write_table(
        args.output,
        ["index", "name", "leverage", "cross_leverage"],
        rows,
        _config_echo(args, ["input", "response"]),
        [
            f"n = {ds.n}",
            f"p = {ds.p}",
            f"rank = {s.rank}",
            f"response_leverage = {s.response_leverage:.12g}",
        ],
    )
    return 0


def _cmd_select(args, parser) -> int:
    ds = _load_dataset(args)
    k = _resolve_k(args, ds.n, parser)
    if args.criterion == "combined" and args.pct_cls is None and args.pct_ls is None:
        parser.error("--criterion combined needs --pct-cls and/or --pct-ls")
    spec = SelectionSpec(
        criterion=args.criterion,
        k=k,
        cls_mode=args.cls_mode,
        ls_mode=args.ls_mode,
        cor_mode=args.cor_mode,
        pct_cls=args.pct_cls or 0.0,
        pct_ls=args.pct_ls or 0.0,
        combined_mode=args.combined_mode,
    )
    result = select(ds, spec)
    names = ds.names()
    rows = []
    for rank, j in enumerate(result.indices):
        score = "" if result.scores_used is None else float(result.scores_used[rank])
        rows.append((rank, int(j), names[j], score))
    write_table(
        args.output,
        ["rank", "index", "name", "score"],
        rows,
        _config_echo(
            args,
            ["input", "response", "criterion", "cls_mode", "ls_mode", "cor_mode",
             "pct_cls", "pct_ls", "combined_mode"],
        ),
        [f"k = {k}", f"selected = {len(result)}", f"truncated = {result.truncated}"],
    )
    return 0


def _cmd_simulate(args, parser) -> int:
    if (args.scenario is None) == (args.dnf_file is None):
        parser.error("give exactly one of --scenario or --dnf-file")
    if args.scenario is not None:
        spec = builtin_scenario(
            args.scenario,
            args.n,
            args.p,
            seed=args.seed,
            calibration=args.calibration,
            target_prevalence=args.prevalence,
        )
    else:
        dnf = dnf_from_text(Path(args.dnf_file).read_text())
        q = calibrate(dnf, args.prevalence)
        probs = np.full(args.p, 0.5)
        for term in dnf:
            for v in term:
                probs[v] = q
        spec = ScenarioSpec(n=args.n, p=args.p, dnf=dnf, probs=probs, seed=args.seed)
    if args.flip_prob:
        spec = replace(spec, flip_prob=args.flip_prob)
    ds = generate(spec)
    echo = _config_echo(
        args, ["scenario", "dnf_file", "n", "p", "seed", "calibration", "prevalence",
               "flip_prob"]
    )
    comments = [f"levsel {__version__}"] + [f"{k} = {v}" for k, v in echo.items()]
    io.write_dataset_csv(ds, args.output, comments=comments)
    return 0


def _cmd_fit_logic(args, parser) -> int:
    ds = _load_dataset(args)
    params = AnnealParams(
        nleaves_max=args.nleaves,
        iterations=args.iterations,
        t_start=args.t_start,
        cooling=args.cooling,
        seed=args.seed,
    )
    echo = _config_echo(
        args, ["input", "response", "iterations", "nleaves", "cooling", "seed", "ensemble"]
    )
    if args.ensemble:
        imp = ensemble_fit(ds, params, args.ensemble)
        rows = [
            ("variable", ds.names()[j], float(f))
            for j, f in enumerate(imp.variable_frequency)
            if f > 0
        ]
        rows += [
            ("term", term_to_string(t), float(f)) for t, f in imp.term_frequency.items()
        ]
        write_table(args.output, ["kind", "target", "frequency"], rows, echo,
                    [f"bootstraps = {imp.b_boot}"])
        return 0
    model = anneal_fit(ds, params)
    write_lines(
        args.output,
        [
            f"tree = {tree_to_string(model.tree)}",
            f"dnf = {dnf_to_string(model.dnf)}",
            f"score = {model.score}",
            f"class_when_true = {model.predicted_class_when_true}",
            f"class_when_false = {model.predicted_class_when_false}",
            f"iterations_run = {model.iterations_run}",
        ],
        echo,
    )
    return 0


def _cmd_experiment(args, parser) -> int:
    k = None if args.k == "auto" else int(args.k)
    config = ExperimentConfig(
        scenario=args.scenario,
        n=args.n,
        p=args.p,
        replicates=args.replicates,
        k=k,
        seed=args.seed,
        output_dir=args.output_dir,
        calibration=args.calibration,
    )
    if args.study == "density":
        run_density_study(config, jobs=args.jobs)
    elif args.study == "success":
        run_success_study(config, jobs=args.jobs)
    elif args.study == "combo":
        run_combo_grid(config, jobs=args.jobs)
    elif args.study == "pipeline":
        anneal = AnnealParams(
            nleaves_max=args.nleaves, iterations=args.iterations, seed=args.seed
        )
        run_pipeline_study(config, anneal=anneal, b_boot=args.b_boot, jobs=args.jobs)
    else:  # pragma: no cover - argparse restricts choices
        parser.error(f"unknown study {args.study!r}")
    return 0


def _cmd_raster(args, parser) -> int:
    ds = _load_dataset(args)
    if args.indices_file:
        selected = _read_index_column(args.indices_file)
    else:
        selected = np.arange(ds.p)
    io.raster_export(ds, selected, args.output)
    return 0


def _read_index_column(path: str) -> np.ndarray:
    indices = []
    header = None
    for raw in Path(path).read_text().splitlines():
        if raw.startswith("#") or not raw.strip():
            continue
        cells = raw.split("\t")
        if header is None:
            header = cells
            if "index" not in header:
                raise ValueError(f"{path}: no 'index' column in header")
            continue
        indices.append(int(cells[header.index("index")]))
    if not indices:
        raise ValueError(f"{path}: no indices found")
    return np.asarray(indices, dtype=int)


def _cmd_preprocess(args, parser) -> int:
    response = int(args.response) if _is_int(args.response) else args.response
    table = io.load_table(args.input, response)
    missing_before = table.missing_count
    imputed = io.impute(table, seed=args.seed)
    reduced, dropped = io.drop_uninformative(
        imputed, drop_zero_variance=args.drop_zero_variance
    )
    ds = io.to_dataset(reduced)
    echo = _config_echo(
        args, ["input", "response", "seed", "drop_zero_variance"]
    )
    comments = [f"levsel {__version__}"] + [f"{k} = {v}" for k, v in echo.items()]
    io.write_dataset_csv(ds, args.output, response_name=table.response_name,
                         comments=comments)
    rows = [("imputed_cells", "", missing_before)]
    rows += [("dropped_column", table.names[j], int(j)) for j in dropped]
    write_table(
        args.report,
        ["event", "name", "value"],
        rows,
        echo,
        [f"columns_in = {table.p}", f"columns_out = {reduced.p}"],
    )
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levsel",
        description="Leverage / cross-leverage screening for wide binary data",
    )
    parser.add_argument("--version", action="version", version=f"levsel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--config", help="key = value file with flag defaults")
        return p

    p = add("scores", _cmd_scores, help="leverage and cross-leverage table")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True, help="response column name or position")
    p.add_argument("--output", required=True)

    p = add("select", _cmd_select, help="top-k variable selection")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--criterion", default="cls",
                   choices=["cls", "ls", "cor", "pval", "combined"])
    p.add_argument("--k", default="auto", help="subset size or 'auto' for ceil(n ln n)")
    p.add_argument("--cls-mode", default="absolute", choices=["absolute", "signed"])
    p.add_argument("--ls-mode", default="ascending", choices=["ascending", "descending"])
    p.add_argument("--cor-mode", default="absolute", choices=["absolute", "signed"])
    p.add_argument("--pct-cls", type=float, default=None)
    p.add_argument("--pct-ls", type=float, default=None)
    p.add_argument("--combined-mode", default="union", choices=["union", "sequential"])

    p = add("simulate", _cmd_simulate, help="generate a synthetic dataset")
    p.add_argument("--scenario", type=int, choices=[1, 2, 3])
    p.add_argument("--dnf-file", help="ground truth, one comma-separated term per line")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--calibration", default="per-term", choices=["per-term", "uniform"])
    p.add_argument("--prevalence", type=float, default=0.5)
    p.add_argument("--flip-prob", type=float, default=0.0)
    p.add_argument("--output", required=True)

    p = add("fit-logic", _cmd_fit_logic, help="fit a logic model by annealing")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--iterations", type=int, default=50_000)
    p.add_argument("--nleaves", type=int, default=30)
    p.add_argument("--t-start", type=float, default=None)
    p.add_argument("--cooling", type=float, default=0.999)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ensemble", type=int, default=0,
                   help="bootstrap count; 0 fits a single model")

    p = add("experiment", _cmd_experiment, help="run a simulation study")
    p.add_argument("--study", required=True,
                   choices=["density", "success", "combo", "pipeline"])
    p.add_argument("--scenario", type=int, default=1, choices=[1, 2, 3])
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--p", type=int, default=1000)
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--k", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--calibration", default="per-term", choices=["per-term", "uniform"])
    p.add_argument("--output-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--iterations", type=int, default=20_000, help="pipeline annealing budget")
    p.add_argument("--nleaves", type=int, default=30)
    p.add_argument("--b-boot", type=int, default=20, help="pipeline bootstrap count")

    p = add("raster", _cmd_raster, help="portable-pixmap raster of selected columns")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--indices-file", help="a select output; defaults to all columns")

    p = add("preprocess", _cmd_preprocess, help="impute and drop uninformative columns")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--drop-zero-variance", action="store_true")

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config_file(args, argv)
        return args.handler(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"levsel: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
