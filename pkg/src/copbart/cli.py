"""Command-line front end: ``copbart {simulate,fit,gof,metrics,plotdata,study}``.

Settings come from a flat ``key = value`` file (``--config``), overridden by
``--key value`` flags.  Every run writes into one directory holding a config
snapshot, its outputs and a ``manifest.json`` with the seeds used.  Outputs
carry no timestamps, so identical inputs give byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .copulas import CopulaDomainError, CopulaModel, Family
from .data import Dataset
from .diagnostics import PosteriorSummary, ci_cov, ci_length, gof_harness, rmse, to_scale, write_gof_csv
from .sampler import ChainTrace, ConfigError, HyperParams, SamplerConfig, run_chain
from .simulation import DGPSpec, TauShape, generate_dataset, replicate_study
from .tree import LossPrior

OUTPUT_ROOT_ENV = "COPBART_OUTPUT_ROOT"
EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


class DataError(ValueError):
    pass


# -- configuration ----------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    family: str = "gaussian"
    df: float = 4.0
    trees: int = 1
    iterations: int = 3000
    burn_in: int = -1  # -1: half the iterations
    chains: int = 4
    eta0: int = 500
    proposal_var: float = -1.0  # -1: 0.2, or 1.0 for Frank
    init_var: float = 0.1
    eps: float = 1e-6
    adaptive: bool = True
    omega: float = 1.62
    zeta: float = 0.62
    prior_sign: str = "penalizing"
    a: float = 1.0
    b: float = 2.0
    move_probs: str = "0.25,0.25,0.25,0.25"
    seed: int = 0
    workers: int = 1
    # simulation
    tau: str = "tree"
    n: int = 200
    replicates: int = 10
    variants: str = "adaptive,fixed"
    # gof / metrics
    gof_replicates: int = 100
    n_perm: int = 1000
    scale: str = "tau"
    # paths
    input: str = ""
    truth: str = ""
    output: str = ""

    def validate(self) -> "RunConfig":
        try:
            Family.parse(self.family)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        TauShape.parse(self.tau)
        checks = [
            (self.df > 2, "df must exceed 2"),
            (self.trees >= 1, "trees must be at least 1"),
            (self.iterations >= 1, "iterations must be at least 1"),
            (self.burn_in == -1 or 0 <= self.burn_in < self.iterations, "burn_in must be -1 or in [0, iterations)"),
            (self.chains >= 1, "chains must be at least 1"),
            (self.eta0 >= 2, "eta0 must be at least 2"),
            (self.proposal_var == -1.0 or self.proposal_var > 0, "proposal_var must be positive (or -1 for the default)"),
            (self.init_var > 0 and self.eps > 0, "init_var and eps must be positive"),
            (self.omega >= 0, "omega must be nonnegative"),
            (self.prior_sign in ("as-printed", "penalizing"), "prior_sign must be as-printed or penalizing"),
            (self.a > 0 and self.b > 0, "a and b must be positive"),
            (self.workers >= 1, "workers must be at least 1"),
            (self.n >= 2, "n must be at least 2"),
            (self.replicates >= 1, "replicates must be at least 1"),
            (self.gof_replicates >= 1, "gof_replicates must be at least 1"),
            (self.n_perm >= 1, "n_perm must be at least 1"),
            (self.scale in ("tau", "theta"), "scale must be tau or theta"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        self.hyper()  # move probabilities
        for v in self.variant_list():
            if v not in ("adaptive", "fixed"):
                raise ConfigError(f"unknown sampler variant {v!r}")
        return self

    def model(self) -> CopulaModel:
        return CopulaModel(Family.parse(self.family), self.df)

    def hyper(self) -> HyperParams:
        try:
            probs = tuple(float(p) for p in self.move_probs.split(","))
        except ValueError:
            raise ConfigError(f"move_probs must be four comma-separated numbers, got {self.move_probs!r}") from None
        return HyperParams(self.a, self.b, LossPrior(self.omega, self.zeta, self.prior_sign), probs)

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(
            n_trees=self.trees,
            iterations=self.iterations,
            burn_in=None if self.burn_in == -1 else self.burn_in,
            eta0=self.eta0,
            proposal_var=None if self.proposal_var == -1.0 else self.proposal_var,
            adaptive=self.adaptive,
            eps=self.eps,
            init_var=self.init_var,
            hyper=self.hyper(),
        )

    def variant_list(self) -> list[str]:
        return [v.strip() for v in self.variants.split(",") if v.strip()]

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name: f for f in fields(RunConfig)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(key: str, raw: str):
    if key not in _FIELDS:
        raise ConfigError(f"unknown configuration key {key!r}")
    typ = type(getattr(RunConfig(), key))
    raw = raw.strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError
        if typ is int:
            return int(raw)
        if typ is float:
            out = float(raw)
            if not math.isfinite(out):
                raise ValueError
            return out
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {key} (expected {typ.__name__})") from None
    return raw


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        values[key] = _coerce(key, val)
    return replace(base or RunConfig(), **values)


def load_config(path: str | None, overrides: dict[str, str]) -> RunConfig:
    cfg = RunConfig()
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(f"cannot read config file {path}: {err.strerror}") from None
        cfg = parse_config_text(text, cfg)
    cfg = replace(cfg, **{k: _coerce(k, v) for k, v in overrides.items()})
    return cfg.validate()


# -- data files ---------------------------------------------------------------------------


@dataclass
class Table:
    columns: dict[str, np.ndarray]

    def __getitem__(self, key):
        return self.columns[key]

    def __contains__(self, key):
        return key in self.columns

    def covariates(self) -> np.ndarray:
        names = [c for c in self.columns if c == "x" or (c.startswith("x") and c[1:].isdigit())]
        if not names:
            raise DataError("missing covariate column 'x' (or x1, x2, ...)")
        names.sort(key=lambda c: (len(c), c))
        return np.column_stack([self.columns[c] for c in names])


def read_table(path) -> Table:
    try:
        fh = open(Path(path), newline="", encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot open {path}: {err.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DataError(f"{path}: empty file, a header row is required")
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise DataError(f"{path}: duplicate column names")
        rows = []
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}, line {lineno}: expected {len(header)} fields, found {len(row)}")
            vals = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(f"{path}, line {lineno}, column {name}: {cell!r} is not a number") from None
                if not math.isfinite(v):
                    raise DataError(f"{path}, line {lineno}, column {name}: non-finite value")
                vals.append(v)
            rows.append(vals)
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return Table({h: arr[:, i] for i, h in enumerate(header)})


def load_dataset(path) -> Dataset:
    """Pseudo-observations (u1, u2) are used as given; raw (y1, y2) are rank-transformed."""
    t = read_table(path)
    X = t.covariates()
    if X.shape[0] < 2:
        raise DataError(f"{path}: need at least 2 data rows, found {X.shape[0]}")
    try:
        if "u1" in t and "u2" in t:
            return Dataset(t["u1"], t["u2"], X)
        if "y1" in t and "y2" in t:
            return Dataset.from_raw(t["y1"], t["y2"], X)
    except ValueError as err:
        raise DataError(f"{path}: {err}") from None
    missing = [c for c in ("u1", "u2") if c not in t]
    raise DataError(f"{path}: missing column(s) {', '.join(missing)} (or raw y1, y2)")


def _fmt(v) -> str:
    return repr(float(v))


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- trace export -------------------------------------------------------------------------


def write_trace_csv(trace: ChainTrace, path: Path) -> None:
    m = trace.n_leaves.shape[1]
    header = ["iteration", "loglik"]
    for k in range(m):
        header += [f"n_leaves_{k}", f"depth_{k}", f"move_{k}", f"outcome_{k}", f"leaf_accepts_{k}"]
    rows = []
    for t in range(trace.iterations):
        r = [t + 1, trace.loglik[t]]
        for k in range(m):
            r += [int(trace.n_leaves[t, k]), int(trace.depth[t, k]), int(trace.moves[t, k]),
                  int(trace.outcomes[t, k]), int(trace.leaf_accepts[t, k])]
        rows.append(r)
    write_csv(path, header, rows)


def posterior_table(traces: list[ChainTrace], model: CopulaModel) -> dict:
    """Pooled post-burn-in summaries of theta and tau per observation."""
    theta = np.concatenate([tr.theta[tr.kept()] for tr in traces])
    tau = to_scale(theta, model, "tau")
    out = {}
    for name, d in (("theta", theta), ("tau", tau)):
        lo, hi = np.quantile(d, (0.025, 0.975), axis=0)
        out[name] = {"mean": d.mean(axis=0).tolist(), "q025": lo.tolist(), "q975": hi.tolist()}
    return out


# -- run directories ------------------------------------------------------------------------


def run_dir(cfg: RunConfig, command: str) -> Path:
    if cfg.output:
        out = Path(cfg.output)
    else:
        out = Path(os.environ.get(OUTPUT_ROOT_ENV, "runs")) / f"{command}-{cfg.family}-seed{cfg.seed}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _start(cfg: RunConfig, command: str) -> Path:
    out = run_dir(cfg, command)
    (out / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
    return out


def _manifest(out: Path, command: str, cfg: RunConfig, files: list[str], **extra) -> None:
    write_json(out / "manifest.json", {"command": command, "seed": cfg.seed, "files": sorted(files), **extra})


# -- subcommands ---------------------------------------------------------------------------


def cmd_simulate(cfg: RunConfig) -> Path:
    spec = DGPSpec(cfg.tau, cfg.family, cfg.n, 1, cfg.seed, cfg.df)
    sim = generate_dataset(spec)
    out = _start(cfg, "simulate")
    d = sim.data
    write_csv(out / "data.csv", ["x", "u1", "u2", "theta_true", "tau_true"],
              zip(d.X[:, 0], d.u1, d.u2, sim.theta, sim.tau))
    _manifest(out, "simulate", cfg, ["config.txt", "data.csv"])
    return out


def _run_one(args):
    cfg, data, model, seed = args
    return run_chain(cfg, data, model, seed)


def run_chains(cfg: RunConfig, data: Dataset, model: CopulaModel) -> tuple[list[ChainTrace], list]:
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    jobs = [(cfg.sampler(), data, model, s) for s in seeds]
    if cfg.workers > 1 and cfg.chains > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, cfg.chains)) as ex:
            traces = list(ex.map(_run_one, jobs))
    else:
        traces = [_run_one(j) for j in jobs]
    return traces, [list(s.spawn_key) for s in seeds]


def cmd_fit(cfg: RunConfig) -> Path:
    if not cfg.input:
        raise ConfigError("fit needs an input data file (--input)")
    data = load_dataset(cfg.input)
    model = cfg.model()
    traces, keys = run_chains(cfg, data, model)
    out = _start(cfg, "fit")
    files = ["config.txt", "summary.json", "model.json"]
    for j, tr in enumerate(traces):
        write_trace_csv(tr, out / f"chain_{j}.csv")
        np.save(out / f"theta_chain_{j}.npy", tr.theta)
        files += [f"chain_{j}.csv", f"theta_chain_{j}.npy"]
    post = posterior_table(traces, model)
    summary = {
        "family": model.family.value,
        "n": data.n,
        "chains": cfg.chains,
        "iterations": cfg.iterations,
        "burn_in": traces[0].n_burn,
        "acceptance": [tr.acceptance_rate() for tr in traces],
        "mean_leaves": [float(tr.n_leaves[tr.kept()].mean()) for tr in traces],
        "mean_depth": [float(tr.depth[tr.kept()].mean()) for tr in traces],
        "x": data.X.tolist(),
        **post,
    }
    write_json(out / "summary.json", summary)
    write_json(out / "model.json", {
        "family": model.family.value,
        "df": model.df,
        "x": data.X.tolist(),
        "u1": data.u1.tolist(),
        "u2": data.u2.tolist(),
        "theta_hat": post["theta"]["mean"],
        "final_trees": [tr.final_trees for tr in traces],
    })
    _manifest(out, "fit", cfg, files, chain_seed_keys=keys, input=str(cfg.input))
    return out


def _load_json(path: Path, what: str) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError:
        raise DataError(f"missing {what} file {path}") from None
    except json.JSONDecodeError as err:
        raise DataError(f"{path}: malformed JSON ({err.msg})") from None


def _fit_dir(cfg: RunConfig, command: str) -> Path:
    if not cfg.input:
        raise ConfigError(f"{command} needs a fit directory (--input)")
    return Path(cfg.input)


def cmd_gof(cfg: RunConfig) -> Path:
    fit = _load_json(_fit_dir(cfg, "gof") / "model.json", "fitted model")
    model = CopulaModel(Family.parse(fit["family"]), fit["df"])
    rows = gof_harness(np.array(fit["theta_hat"]), np.array(fit["u1"]), np.array(fit["u2"]), model,
                       cfg.gof_replicates, cfg.n_perm, cfg.seed)
    out = _start(cfg, "gof")
    write_gof_csv(rows, out / "gof.csv")
    _manifest(out, "gof", cfg, ["config.txt", "gof.csv"], input=str(cfg.input))
    return out


def _truth_values(cfg: RunConfig, model: CopulaModel, n: int) -> np.ndarray:
    if not cfg.truth:
        raise ConfigError("metrics needs a truth file (--truth)")
    t = read_table(cfg.truth)
    col = f"{cfg.scale}_true"
    if col in t:
        truth = t[col]
    elif "theta_true" in t:
        truth = to_scale(t["theta_true"], model, cfg.scale)
    else:
        raise DataError(f"{cfg.truth}: missing column {col} (or theta_true)")
    if truth.shape[0] != n:
        raise DataError(f"{cfg.truth}: {truth.shape[0]} truth rows for {n} observations")
    return truth


def cmd_metrics(cfg: RunConfig) -> Path:
    fit_dir = _fit_dir(cfg, "metrics")
    summ_json = _load_json(fit_dir / "summary.json", "summary")
    model = CopulaModel(Family.parse(summ_json["family"]))
    draws = []
    burn = summ_json["burn_in"]
    for j in range(summ_json["chains"]):
        try:
            theta = np.load(fit_dir / f"theta_chain_{j}.npy")
        except OSError:
            raise DataError(f"missing trace file {fit_dir / f'theta_chain_{j}.npy'}") from None
        draws.append(to_scale(theta[burn:], model, cfg.scale))
    summ = PosteriorSummary.from_draws(np.array(draws)[None], cfg.scale)
    truth = _truth_values(cfg, model, summ.shape[2])
    out = _start(cfg, "metrics")
    write_csv(out / "metrics.csv", ["scale", "rmse", "rmse_rooted", "ci_length", "ci_cov"],
              [[cfg.scale, rmse(summ, truth), rmse(summ, truth, rooted=True), ci_length(summ), ci_cov(summ, truth)]])
    _manifest(out, "metrics", cfg, ["config.txt", "metrics.csv"], input=str(cfg.input), truth=str(cfg.truth))
    return out


def cmd_plotdata(cfg: RunConfig) -> Path:
    summ = _load_json(_fit_dir(cfg, "plotdata") / "summary.json", "summary")
    x = np.array(summ["x"])[:, 0]
    tau = summ["tau"]
    order = np.argsort(x, kind="stable")
    out = _start(cfg, "plotdata")
    rows = [[x[i], tau["mean"][i], tau["q025"][i], tau["q975"][i]] for i in order]
    write_csv(out / "plot.csv", ["x", "tau_hat", "lower", "upper"], rows)
    _manifest(out, "plotdata", cfg, ["config.txt", "plot.csv"], input=str(cfg.input))
    return out


def cmd_study(cfg: RunConfig) -> Path:
    spec = DGPSpec(cfg.tau, cfg.family, cfg.n, cfg.replicates, cfg.seed, cfg.df)
    out = _start(cfg, "study")
    replicate_study(spec, cfg.sampler(), cfg.chains, tuple(cfg.variant_list()), cfg.scale, out_dir=out)
    _manifest(out, "study", cfg, ["config.txt", "replicates.csv", "spec.json", "study.csv"])
    return out


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "gof": cmd_gof,
    "metrics": cmd_metrics,
    "plotdata": cmd_plotdata,
    "study": cmd_study,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copbart", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value settings file")
        for f in fields(RunConfig):
            p.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None, metavar="VALUE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig) if getattr(args, f.name) is not None}
    try:
        cfg = load_config(args.config, overrides)
        out = COMMANDS[args.command](cfg)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CopulaDomainError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
