"""Command-line driver: single evaluations, sweeps and figure presets.

Data goes to stdout (or ``--out``) as CSV with the columns in
:data:`COLUMNS`; progress goes to stderr.  ``runtime_ms`` is left empty
unless ``--timing`` is given, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .analysis import coverage
from .config import ConfigError, NetworkConfig, default_config, load_config, parse_assignment
from .montecarlo import mc_coverage, mc_system_rate
from .throughput import RateRequirement, combine_rate, oma_coverages, system_rate_noma

COLUMNS = ["param", "value", "scheme", "role", "method", "coverage_or_rate", "mc_half_width", "runtime_ms"]
METHOD_TO_MODE = {"theorem": "full", "special1": "special1", "special2": "special2"}
ALL_METHODS = ("theorem", "special1", "special2", "mc")

FREQUENCY_BANDS = (
    (28e9, 2.0, 3.0, 10),
    (38e9, 2.0, 3.71, 20),
    (60e9, 2.25, 3.76, 40),
    (73e9, 2.0, 3.4, 80),
)
NOISE_GRID = tuple(float(x) for x in range(-90, -25, 5))


class UsageError(Exception):
    pass


@dataclass
class RunOptions:
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    timing: bool = False


@dataclass(frozen=True)
class Task:
    """One output row to compute."""

    param: str
    value: object
    cfg: NetworkConfig
    role: str            # near | far | system
    method: str
    label: str = ""      # scheme column; defaults to the scheme label
    access: str = "noma"  # for role == system
    rate: RateRequirement | None = None
    n1: int | None = None
    n2: int | None = None


@dataclass
class SweepSpec:
    param: str
    values: list
    methods: list[str]
    roles: list[str] = field(default_factory=lambda: ["near", "far"])
    out: str | None = None

    def __post_init__(self):
        if not self.values:
            raise UsageError("sweep grid is empty")
        if list(self.values) != sorted(self.values):
            raise UsageError("sweep grid must be sorted")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise UsageError(f"unknown method {m!r}; choose from {', '.join(ALL_METHODS)}")


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def evaluate(task: Task, opts: RunOptions) -> dict:
    t0 = time.perf_counter()
    half = None
    cfg = task.cfg
    if task.role == "system":
        if task.method == "mc":
            value = mc_system_rate(cfg, task.rate, opts.samples, opts.seed, task.access)
        else:
            mode = METHOD_TO_MODE[task.method]
            if task.access == "noma":
                value = system_rate_noma(cfg, task.rate, mode)
            else:
                value = combine_rate(task.rate, *oma_coverages(cfg, task.rate, mode))
    elif task.method == "mc":
        est = mc_coverage(cfg, task.role, opts.samples, opts.seed)
        value, half = est.mean, est.half_width
    else:
        value = coverage(cfg, task.role, METHOD_TO_MODE[task.method], n1=task.n1, n2=task.n2).value
    elapsed = (time.perf_counter() - t0) * 1e3
    method = task.method
    if task.n1 is not None or task.n2 is not None:
        method = f"{method}(n1={task.n1 or cfg.n1},n2={task.n2 or cfg.n2})"
    if task.role == "system":
        method = f"{method}:{task.access}"
    return {
        "param": task.param,
        "value": _fmt(task.value),
        "scheme": task.label or cfg.scheme.label(cfg.K),
        "role": task.role,
        "method": method,
        "coverage_or_rate": _fmt(float(value)),
        "mc_half_width": _fmt(half),
        "runtime_ms": f"{elapsed:.1f}" if opts.timing else "",
    }


def _evaluate_packed(args):
    return evaluate(*args)


def run_tasks(tasks: Sequence[Task], opts: RunOptions) -> list[dict]:
    """Evaluate in grid order; rows come back in the same order for any worker count."""
    if opts.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            return list(pool.map(_evaluate_packed, [(t, opts) for t in tasks]))
    rows = []
    for i, task in enumerate(tasks, 1):
        print(f"[{i}/{len(tasks)}] {task.param}={task.value} {task.role} {task.method}", file=sys.stderr)
        rows.append(evaluate(task, opts))
    return rows


def write_rows(rows: Iterable[dict], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if out is None or out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue())
        print(f"wrote {path}", file=sys.stderr)


def _with(cfg: NetworkConfig, param: str, value) -> NetworkConfig:
    return cfg.with_updates(**{param: value})


def sweep_tasks(cfg: NetworkConfig, spec: SweepSpec, rate: RateRequirement | None = None,
                access: Sequence[str] = ("noma",)) -> list[Task]:
    tasks = []
    for value in spec.values:
        c = _with(cfg, spec.param, value)
        for method in spec.methods:
            if rate is not None:
                for acc in access:
                    tasks.append(Task(spec.param, value, c, "system", method, access=acc, rate=rate))
            else:
                for role in spec.roles:
                    tasks.append(Task(spec.param, value, c, role, method))
    return tasks


def run_sweep(cfg: NetworkConfig, spec: SweepSpec, opts: RunOptions | None = None,
              rate: RateRequirement | None = None, access: Sequence[str] = ("noma",)) -> list[dict]:
    return run_tasks(sweep_tasks(cfg, spec, rate, access), opts or RunOptions())


def compare_frequencies(cfg: NetworkConfig, bands=FREQUENCY_BANDS, noise_grid: Sequence[float] = (-50.0,),
                        methods: Sequence[str] = ("theorem",), opts: RunOptions | None = None) -> list[dict]:
    """Coverage per carrier frequency and role, followed by per-role rankings.

    Ranking rows use ``method = rank:<method>`` and hold the rank (1 = best)
    in ``coverage_or_rate``; they rank by the mean over the noise grid.
    """
    opts = opts or RunOptions()
    tasks = []
    for f, a_l, a_n, M in bands:
        base = cfg.with_updates(carrier_frequency_hz=f, alpha_L=a_l, alpha_N=a_n, M=M)
        for nd in noise_grid:
            c = base.with_updates(noise_dbm=nd)
            for role in ("near", "far"):
                for method in methods:
                    tasks.append(Task("carrier_frequency_hz", f, c, role, method, label=f"{base.scheme.label(base.K)};noise_dbm={nd!r}"))
    rows = run_tasks(tasks, opts)
    for role in ("near", "far"):
        for method in methods:
            means = {}
            for f, *_ in bands:
                vals = [float(r["coverage_or_rate"]) for r in rows
                        if r["role"] == role and r["method"] == method and r["value"] == _fmt(f)]
                means[f] = sum(vals) / len(vals)
            ranked = sorted(means, key=lambda k: -means[k])
            for pos, f in enumerate(ranked, 1):
                rows.append({"param": "carrier_frequency_hz", "value": _fmt(f), "scheme": cfg.scheme.label(cfg.K),
                             "role": role, "method": f"rank:{method}", "coverage_or_rate": str(pos),
                             "mc_half_width": "", "runtime_ms": ""})
    return rows


def frequency_ranking(rows: Sequence[dict], role: str, method: str = "theorem") -> list[float]:
    """Frequencies of a :func:`compare_frequencies` result, best first."""
    ranked = [r for r in rows if r["role"] == role and r["method"] == f"rank:{method}"]
    return [float(r["value"]) for r in sorted(ranked, key=lambda r: int(r["coverage_or_rate"]))]


# ---------------------------------------------------------------------------
# Figure presets

FIG2_RANGES = {"R1": dict(a_k=0.4, tau_k=1.0, tau_j=1.0), "R2": dict(a_k=0.1, tau_k=1.0, tau_j=0.2)}
SCHEMES = (("FNRF", {}), ("RNFF", {}), ("FNFF", {"k": 1, "j": None}))


def _schemes(cfg: NetworkConfig):
    for kind, extra in SCHEMES:
        yield cfg.with_updates(scheme=kind, k=extra.get("k"), j=extra.get("j"))


def _noise_tasks(cfg: NetworkConfig, role: str, methods, suffix: str = "", grid=NOISE_GRID, **kw) -> list[Task]:
    tasks = []
    for nd in grid:
        c = cfg.with_updates(noise_dbm=nd)
        for m in methods:
            tasks.append(Task("noise_dbm", nd, c, role, m, label=c.scheme.label(c.K) + suffix, **kw))
    return tasks


def fig2a(cfg, methods):
    tasks = []
    for tag, upd in FIG2_RANGES.items():
        for c in _schemes(cfg.with_updates(**upd)):
            tasks += _noise_tasks(c, "near", methods, f";{tag}")
    return tasks


def fig2b(cfg, methods):
    tasks = []
    base = cfg.with_updates(**FIG2_RANGES["R2"])
    for c in _schemes(base):
        tasks += _noise_tasks(c, "far", methods)
    for spacing in (150.0, 100.0):
        dense = base.with_updates(lambda_c=1.0 / (spacing**2 * math.pi))
        for c in _schemes(dense):
            tasks += _noise_tasks(c, "far", [m for m in methods if m != "special2"], f";lambda_c=1/({spacing:g}^2 pi)")
    return tasks


def fig3a(cfg, methods):
    base = cfg.with_updates(tau_k=1.0, tau_j=0.2, noise_dbm=-50.0)
    tasks = []
    for c in _schemes(base):
        for sigma in (5.0, 10.0, 15.0, 20.0, 25.0, 30.0):
            for role in ("near", "far"):
                for m in methods:
                    tasks.append(Task("sigma_m", sigma, c.with_updates(sigma_m=sigma), role, m))
    return tasks


FIG3B_SETTINGS = dict(a_k=0.2, tau_k=1.0, tau_j=0.2, sigma_m=15.0, noise_dbm=-50.0)


def fig3b(cfg, methods):
    base = cfg.with_updates(**FIG3B_SETTINGS)
    tasks = []
    for kind in ("FNRF", "RNFF"):
        for K in range(1, 10):
            c = base.with_updates(K=K, scheme=kind, k=None, j=None)
            for role in ("near", "far"):
                for m in methods:
                    tasks.append(Task("K", K, c, role, m))
    return tasks


FIG4A_M = (4, 8, 16, 24, 32, 48, 64, 96, 128)


def fig4a(cfg, methods):
    base = cfg.with_updates(a_k=0.2, noise_dbm=-50.0)
    tasks = []
    for c in _schemes(base):
        for M in FIG4A_M:
            for role in ("near", "far"):
                for m in methods:
                    tasks.append(Task("M", M, c.with_updates(M=M), role, m))
    return tasks


FIG5_RATE = RateRequirement(100e6, 30e6, 100e6)


FIG5A_SETTINGS = dict(K=4, a_k=0.4)


def fig5a(cfg, methods):
    base = cfg.with_updates(**FIG5A_SETTINGS)
    tasks = []
    far8 = base.with_updates(scheme="FNFF", k=1, j=8)
    near2 = base.with_updates(scheme="FNFF", k=1, j=2)
    for m in methods:
        for nd in NOISE_GRID:
            for c, acc in ((far8, "noma"), (far8, "oma"), (near2, "noma"),
                           (base.with_updates(scheme="FNRF"), "noma"), (base.with_updates(scheme="RNFF"), "noma")):
                tasks.append(Task("noise_dbm", nd, c.with_updates(noise_dbm=nd), "system", m, access=acc, rate=FIG5_RATE))
    return tasks


FIG5B_M = (4, 8, 16, 24, 32, 48, 64, 96, 128)
FIG5B_SETTINGS = dict(a_k=0.4, noise_dbm=-50.0)


def fig5b(cfg, methods):
    base = cfg.with_updates(**FIG5B_SETTINGS)
    tasks = []
    for c in _schemes(base):
        for M in FIG5B_M:
            for m in methods:
                tasks.append(Task("M", M, c.with_updates(M=M), "system", m, rate=FIG5_RATE))
    return tasks


FIG6_SETTINGS = dict(scheme="RNFF", j=4, a_k=0.1, tau_k=1.0, tau_j=0.2)


def fig6(cfg, methods):
    base = cfg.with_updates(**FIG6_SETTINGS)
    tasks = []
    for n1, n2 in ((10, 5), (10, 10), (10, 50), (10, 200), (1, 50)):
        tasks += _noise_tasks(base, "far", ["special1"], n1=n1, n2=n2)
    tasks += _noise_tasks(base, "far", [m for m in methods if m == "mc"])
    return tasks


FIGURES = {
    "fig2a": (fig2a, ["theorem", "special1", "special2", "mc"]),
    "fig2b": (fig2b, ["theorem", "special1", "special2", "mc"]),
    "fig3a": (fig3a, ["theorem"]),
    "fig3b": (fig3b, ["theorem"]),
    "fig4a": (fig4a, ["theorem"]),
    "fig4b": (None, ["theorem"]),
    "fig5a": (fig5a, ["theorem"]),
    "fig5b": (fig5b, ["theorem"]),
    "fig6": (fig6, ["mc"]),
}


# ---------------------------------------------------------------------------
# Validation suite


def validate(cfg: NetworkConfig, opts: RunOptions, tolerance: float = 0.02,
             grid: Sequence[float] = (-90.0, -70.0, -50.0, -30.0)) -> tuple[bool, list[str]]:
    """Theorem vs Monte Carlo on a small noise grid for every scheme and role."""
    lines = []
    ok = True
    for tag, upd in FIG2_RANGES.items():
        for c in _schemes(cfg.with_updates(**upd)):
            for nd in grid:
                point = c.with_updates(noise_dbm=nd)
                for role in ("near", "far"):
                    a = coverage(point, role).value
                    est = mc_coverage(point, role, opts.samples, opts.seed)
                    bound = max(tolerance, 3 * est.half_width)
                    passed = abs(a - est.mean) <= bound
                    ok &= passed
                    lines.append(f"{'PASS' if passed else 'FAIL'} {tag} {point.scheme.label(point.K)} "
                                 f"noise={nd:g}dBm {role}: theorem={a:.4f} mc={est.mean:.4f} "
                                 f"|diff|={abs(a - est.mean):.4f} bound={bound:.4f}")
    return ok, lines


# ---------------------------------------------------------------------------
# Argument parsing


def _parse_grid(values: str | None, rng: str | None) -> list[float]:
    if values:
        return sorted(float(v) for v in values.split(",") if v.strip())
    if rng:
        parts = [float(p) for p in rng.split(":")]
        if len(parts) != 3 or parts[2] == 0:
            raise UsageError("--range expects start:stop:step")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(max(n, 0))]
    raise UsageError("give --values or --range")


def _int_if_integral(param: str, values: list[float]) -> list:
    if param in ("K", "M", "N_L", "N_N", "n1", "n2", "k", "j"):
        return [int(v) for v in values]
    return values


def _load(args) -> NetworkConfig:
    cfg = load_config(args.config) if args.config else default_config()
    updates = {}
    for item in args.set or []:
        key, value = parse_assignment(item)
        updates[key] = value
    if args.n1 is not None:
        updates["n1"] = args.n1
    if args.n2 is not None:
        updates["n2"] = args.n2
    return cfg.with_updates(**updates) if updates else cfg


def _methods(args, default) -> list[str]:
    methods = args.method or list(default)
    for m in methods:
        if m not in ALL_METHODS:
            raise UsageError(f"unknown method {m!r}")
    return methods


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat TOML config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key (repeatable)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=100_000, help="Monte Carlo realizations")
    common.add_argument("--method", action="append", choices=ALL_METHODS, help="repeatable")
    common.add_argument("--out", help="CSV output path (default stdout)")
    common.add_argument("--n1", type=int, help="Chebyshev order for the interference average")
    common.add_argument("--n2", type=int, help="Chebyshev order for the serving-beam average")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="fill the runtime_ms column")

    parser = argparse.ArgumentParser(prog="mmnoma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate coverage of both users")
    p.add_argument("--role", choices=["near", "far", "both"], default="both")

    p = sub.add_parser("sweep", parents=[common], help="sweep one config key")
    p.add_argument("--param", required=True)
    p.add_argument("--values", help="comma-separated grid")
    p.add_argument("--range", dest="grid_range", help="start:stop:step")
    p.add_argument("--role", choices=["near", "far", "both"], default="both")
    p.add_argument("--rate", nargs=2, type=float, metavar=("R_K", "R_J"),
                   help="report system rate (bit/s targets) instead of coverage")
    p.add_argument("--access", choices=["noma", "oma", "both"], default="noma")

    p = sub.add_parser("compare-freq", parents=[common], help="carrier frequency comparison")
    p.add_argument("--noise", default="-50", help="comma-separated noise grid in dBm")

    p = sub.add_parser("validate", parents=[common], help="theorem vs Monte Carlo agreement")
    p.add_argument("--tolerance", type=float, default=0.02)

    for name in FIGURES:
        sub.add_parser(name, parents=[common], help=f"data for preset {name}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    opts = RunOptions(args.samples, args.seed, args.workers, args.timing)
    try:
        cfg = _load(args)
        if args.command == "eval":
            roles = ["near", "far"] if args.role == "both" else [args.role]
            tasks = [Task("config", "", cfg, r, m) for m in _methods(args, ["theorem"]) for r in roles]
            write_rows(run_tasks(tasks, opts), args.out)
        elif args.command == "sweep":
            grid = _int_if_integral(args.param, _parse_grid(args.values, args.grid_range))
            roles = ["near", "far"] if args.role == "both" else [args.role]
            spec = SweepSpec(args.param, grid, _methods(args, ["theorem"]), roles, args.out)
            rate = None
            access = ["noma", "oma"] if args.access == "both" else [args.access]
            if args.rate:
                rate = RateRequirement(args.rate[0], args.rate[1], cfg.bandwidth)
            write_rows(run_sweep(cfg, spec, opts, rate, access), args.out)
        elif args.command == "compare-freq":
            noise = [float(x) for x in args.noise.split(",")]
            rows = compare_frequencies(cfg, FREQUENCY_BANDS, noise, _methods(args, ["theorem"]), opts)
            write_rows(rows, args.out)
            for role in ("near", "far"):
                ranking = " > ".join(f"{f / 1e9:g} GHz" for f in frequency_ranking(rows, role, _methods(args, ["theorem"])[0]))
                print(f"{role}: {ranking}", file=sys.stderr)
        elif args.command == "validate":
            ok, lines = validate(cfg, opts, args.tolerance)
            for line in lines:
                print(line)
            print("validation " + ("passed" if ok else "FAILED"))
            return 0 if ok else 2
        else:
            builder, default_methods = FIGURES[args.command]
            out = args.out or f"figures/{args.command}.csv"
            methods = _methods(args, default_methods)
            if builder is None:
                rows = compare_frequencies(cfg.with_updates(scheme="FNRF"), FREQUENCY_BANDS, NOISE_GRID, methods, opts)
            else:
                rows = run_tasks(builder(cfg, methods), opts)
            write_rows(rows, out)
    except (ConfigError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
