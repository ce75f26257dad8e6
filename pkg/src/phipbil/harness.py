"""Experiment runner: seeded replication batches, parameter sweeps, comparison
against the bundled reference results, and brute-force oracle checks.

Every run ``i`` of a batch uses seed ``spec.config.seed + i``. Problems that
need randomness (the shuffled HIFF permutation) draw it from a generator
seeded with ``[seed, 1]``, so a run is fully determined by its seed.
"""
from __future__ import annotations

import argparse
import copy
import csv
import functools
import io
import json
import logging
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import combine
from .clustering import initial_clustering
from .engine import DEFAULT_MAX_EVALS, EngineConfig, RunResult, run
from .model import CountTable, ModelPair, rebuild_matrices, MLE, WILSON
from .problems import (
    PROBLEM_NAMES,
    ProblemInstance,
    count_trap5_local_optima,
    enumerate_global_optima,
    enumerate_trap5_local_optima,
    hiff_fitness,
    hiff_optimum,
    make_problem,
    overlapping_trap5_fitness,
)

log = logging.getLogger(__name__)

DEFAULT_SIZES = {"twomax": 100, "trapfive": 100, "overfive": 60, "hiff": 128, "shuff-hiff": 128}
CSV_FIELDS = ("problem", "seed", "evals", "optima", "success", "wall_ms")
SWEEP_FIELDS = ("value", "mean_optima", "mean_evals", "success_fraction", "sd_optima", "sd_evals")
SWEEP_PARAMS = ("p_c", "p_old", "p_w")
SWEEP_MAX_EVALS = 100_000
DEFAULT_TOLERANCES = {"evals_rel": 0.30}


class ReferenceMissing(LookupError):
    pass


# ---------------------------------------------------------------------------
# reference constants
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=1)
def _reference_tree() -> dict:
    text = resources.files("phipbil").joinpath("data/reference.json").read_text()
    return json.loads(text)


def load_reference() -> dict:
    return copy.deepcopy(_reference_tree())


def _is_row(node) -> bool:
    return isinstance(node, dict) and "problem" in node


def reference_keys() -> list[str]:
    keys = []

    def walk(node, path):
        for name, child in node.items():
            if name.startswith("_") or name == "config" or not isinstance(child, dict):
                continue
            if _is_row(child):
                keys.append("/".join(path + [name]))
            else:
                walk(child, path + [name])

    walk(_reference_tree(), [])
    return keys


def reference_row(key: str) -> dict:
    """Look up a row such as ``table3/phi-pbil/Pgrid16``.

    Settings from ``config`` entries on the way down are merged in, the row's
    own fields taking precedence.
    """
    node = _reference_tree()
    merged: dict = {}
    for part in key.split("/"):
        if not isinstance(node, dict) or part.startswith("_") or part == "config" or part not in node:
            raise ReferenceMissing(f"no reference row {key!r}; known rows: {', '.join(reference_keys())}")
        merged.update(node.get("config", {}))
        node = node[part]
    if not _is_row(node):
        raise ReferenceMissing(f"{key!r} is a group, not a row; known rows: {', '.join(reference_keys())}")
    merged.update(copy.deepcopy(node))
    merged["key"] = key
    return merged


def config_from_reference(row: dict, **overrides) -> EngineConfig:
    """EngineConfig from a reference row's settings; missing sizes must come in ``overrides``."""
    settings = {f: row[f] for f in ("n0", "nw", "k", "p_c", "p_old", "p_w", "max_evals", "operator")
                if f in row}
    settings.update({k: v for k, v in overrides.items() if v is not None})
    missing = [f for f in ("n0", "nw", "k") if f not in settings]
    if missing:
        raise ReferenceMissing(f"reference row {row.get('key')!r} gives no {', '.join(missing)}")
    return EngineConfig(**settings)


# ---------------------------------------------------------------------------
# batches
# ---------------------------------------------------------------------------

@dataclass
class ExperimentSpec:
    problem: str
    size: Optional[int]
    config: EngineConfig
    replications: int = 1
    out: Optional[Path] = None
    trace: Optional[Path] = None

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.problem not in PROBLEM_NAMES:
            raise KeyError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEM_NAMES)}")
        if self.size is None:
            self.size = DEFAULT_SIZES.get(self.problem)


def build_problem(name: str, size: Optional[int], seed: int) -> ProblemInstance:
    return make_problem(name, size, rng=np.random.default_rng([seed, 1]))


@dataclass
class BatchStats:
    problem: str
    rows: list[dict]
    details: list[dict] = field(default_factory=list)
    config: Optional[dict] = None

    def __post_init__(self):
        if not self.rows:
            raise ValueError("empty batch: no runs to summarise")

    @property
    def n(self) -> int:
        return len(self.rows)

    def _column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    @staticmethod
    def _sd(values: list) -> Optional[float]:
        return statistics.stdev(values) if len(values) > 1 else None

    @property
    def success_fraction(self) -> float:
        return sum(self._column("success")) / self.n

    @property
    def evals_mean(self) -> float:
        return statistics.fmean(self._column("evals"))

    @property
    def evals_sd(self) -> Optional[float]:
        return self._sd(self._column("evals"))

    @property
    def optima_mean(self) -> float:
        return statistics.fmean(self._column("optima"))

    @property
    def optima_sd(self) -> Optional[float]:
        return self._sd(self._column("optima"))

    def summary(self) -> dict:
        return {
            "problem": self.problem,
            "replications": self.n,
            "config": self.config,
            "success_fraction": self.success_fraction,
            "evals_mean": self.evals_mean,
            "evals_sd": self.evals_sd,
            "optima_mean": self.optima_mean,
            "optima_sd": self.optima_sd,
            "runs": self.details,
        }

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "BatchStats":
        with open(path, newline="") as fh:
            rows = [{"problem": r["problem"], "seed": int(r["seed"]), "evals": int(r["evals"]),
                     "optima": int(r["optima"]), "success": int(r["success"]),
                     "wall_ms": int(r["wall_ms"])} for r in csv.DictReader(fh)]
        return cls(rows[0]["problem"] if rows else "", rows)


def _output_paths(out: Union[str, Path]) -> tuple[Path, Path]:
    out = Path(out)
    if out.suffix in (".csv", ".json"):
        out = out.with_suffix("")
    return out.with_name(out.name + ".csv"), out.with_name(out.name + ".json")


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e


def _csv_text(fields: Sequence[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_batch(stats: BatchStats, out: Union[str, Path]) -> tuple[Path, Path]:
    """Write the per-run CSV and the JSON summary next to each other."""
    csv_path, json_path = _output_paths(out)
    _write_text(csv_path, _csv_text(CSV_FIELDS, stats.rows))
    _write_text(json_path, json.dumps(stats.summary(), indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def _trace_path(trace: Path, seed: int, replications: int) -> Path:
    if replications == 1:
        return trace
    return trace.with_name(f"{trace.stem}.seed{seed}{trace.suffix}")


def run_single(spec: ExperimentSpec, index: int) -> tuple[RunResult, dict, dict]:
    """Run replication ``index`` of ``spec``: returns the result, its CSV row and JSON details."""
    seed = spec.config.seed + index
    cfg = replace(spec.config, seed=seed)
    problem = build_problem(spec.problem, spec.size, seed)
    t0 = time.perf_counter()
    if spec.trace is not None:
        path = _trace_path(Path(spec.trace), seed, spec.replications)
        try:
            with open(path, "w") as fh:
                result = run(cfg, problem, trace=fh)
        except OSError as e:
            raise OSError(f"cannot write trace {path}: {e.strerror or e}") from e
    else:
        result = run(cfg, problem)
    wall_ms = int(round(1000 * (time.perf_counter() - t0)))
    row = {
        "problem": problem.name,
        "seed": seed,
        "evals": result.evals_to_convergence,
        "optima": result.distinct_global_optima_found,
        "success": int(result.success),
        "wall_ms": wall_ms,
    }
    detail = result.to_dict(with_population=False)
    if "permutation" in problem.meta:
        detail["permutation"] = [int(x) for x in problem.meta["permutation"]]
    return result, row, detail


def run_batch(spec: ExperimentSpec) -> BatchStats:
    rows, details = [], []
    for i in range(spec.replications):
        _, row, detail = run_single(spec, i)
        log.info("%s seed=%d evals=%d optima=%d", row["problem"], row["seed"], row["evals"], row["optima"])
        rows.append(row)
        details.append(detail)
    rows.sort(key=lambda r: r["seed"])
    details.sort(key=lambda d: d["seed"])
    stats = BatchStats(rows[0]["problem"], rows, details, asdict(spec.config))
    if spec.out is not None:
        write_batch(stats, spec.out)
    return stats


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepReport:
    param: str
    points: list[tuple[float, BatchStats]]

    def rows(self) -> list[dict]:
        return [{"value": v, "mean_optima": s.optima_mean, "mean_evals": s.evals_mean,
                 "success_fraction": s.success_fraction, "sd_optima": s.optima_sd,
                 "sd_evals": s.evals_sd} for v, s in self.points]

    def to_csv(self) -> str:
        return _csv_text(SWEEP_FIELDS, self.rows())

    def __getitem__(self, value: float) -> BatchStats:
        for v, s in self.points:
            if v == value:
                return s
        raise KeyError(value)


def parameter_sweep(problem: str, size: Optional[int], param: str, values: Sequence[float],
                    base: EngineConfig, replications: int,
                    out: Optional[Union[str, Path]] = None) -> SweepReport:
    """One batch per value of ``param``, each capped at 100,000 evaluations.

    ``out`` receives the plottable CSV (value, mean optima, mean evals, ...).
    """
    if param not in SWEEP_PARAMS:
        raise ValueError(f"can only sweep {', '.join(SWEEP_PARAMS)}, not {param!r}")
    if not values:
        raise ValueError("no sweep values given")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise ValueError(f"sweep values must lie in [0, 1]: {list(values)}")
    points = []
    for v in values:
        cfg = replace(base, **{param: float(v)}, max_evals=min(base.max_evals, SWEEP_MAX_EVALS))
        points.append((float(v), run_batch(ExperimentSpec(problem, size, cfg, replications))))
    report = SweepReport(param, points)
    if out is not None:
        _write_text(Path(out), report.to_csv())
    return report


# ---------------------------------------------------------------------------
# comparison with reference rows
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    reference: str
    checks: list[dict]

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"reference": self.reference, "passed": self.passed, "checks": self.checks}

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            rel = "" if c.get("rel_error") is None else f" rel_error={c['rel_error']:+.3f}"
            out.append(f"{'PASS' if c['passed'] else 'FAIL'} {self.reference} {c['metric']}: "
                       f"observed={c['observed']:.4g} expected={c['expected']:.4g}{rel}")
        return out


def compare_to_reference(stats: BatchStats, reference: Union[str, dict],
                         tolerances: Optional[dict] = None) -> Verdict:
    """Check a batch against a reference row.

    Default rules: mean evaluations within 30% (relative); mean optima equal
    when the reference sd is zero, else within one reference sd; success
    fraction within one run of the reference fraction. ``tolerances`` may set
    ``evals_rel`` and ``optima_abs``.
    """
    if stats is None or stats.n == 0:
        raise ValueError("empty batch: nothing to compare")
    row = reference_row(reference) if isinstance(reference, str) else reference
    if not any(k in row for k in ("evals_mean", "optima_mean", "success")):
        raise ReferenceMissing(f"reference {row.get('key', row)!r} has no metrics")
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    checks = []
    if "success" in row:
        diff = abs(stats.success_fraction - row["success"])
        checks.append({"metric": "success", "observed": stats.success_fraction,
                       "expected": row["success"], "rel_error": None,
                       "tolerance": 1 / stats.n, "passed": diff <= 1 / stats.n + 1e-12})
    if "optima_mean" in row:
        allowed = tol.get("optima_abs", row.get("optima_sd", 0.0))
        diff = abs(stats.optima_mean - row["optima_mean"])
        checks.append({"metric": "optima", "observed": stats.optima_mean,
                       "expected": row["optima_mean"], "rel_error": None,
                       "tolerance": allowed, "passed": diff <= allowed + 1e-9})
    if "evals_mean" in row:
        rel = (stats.evals_mean - row["evals_mean"]) / row["evals_mean"]
        checks.append({"metric": "evals", "observed": stats.evals_mean,
                       "expected": row["evals_mean"], "rel_error": rel,
                       "tolerance": tol["evals_rel"], "passed": abs(rel) <= tol["evals_rel"]})
    return Verdict(row.get("key", row.get("problem", "?")), checks)


# ---------------------------------------------------------------------------
# oracle validation
# ---------------------------------------------------------------------------

@dataclass
class OracleReport:
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    def lines(self) -> list[str]:
        return [f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}" + (f": {c['detail']}" if c["detail"] else "")
                for c in self.checks]


def _hiff_recursive(block: list) -> int:
    if len(block) == 1:
        return 1
    half = len(block) // 2
    inner = _hiff_recursive(block[:half]) + _hiff_recursive(block[half:])
    return inner + (len(block) if all(b == block[0] for b in block) else 0)


def _overfive_loop(g: np.ndarray, blocks: int) -> int:
    m, total = len(g), 0
    for b in range(blocks):
        u = sum(int(g[(3 * b + t) % m]) for t in range(5))
        total += 5 if u == 5 else 4 - u
    return total


def _genome_text(g: np.ndarray) -> str:
    return "".join(str(int(x)) for x in g)


def _check_hiff(report: OracleReport, rng: np.random.Generator) -> None:
    opt = enumerate_global_optima(make_problem("hiff", 16))
    found = sorted(_genome_text(g) for g in opt)
    report.add("hiff16 exhaustive optima", found == ["0" * 16, "1" * 16]
               and hiff_fitness(opt[0]) == 80, f"optima={found}")
    bad = None
    for p in range(9):
        m = 2 ** p
        if not (hiff_optimum(m) == (p + 1) * m == _hiff_recursive([1] * m)):
            bad = f"closed form differs at p={p}"
            break
        for g in rng.integers(0, 2, (20, m), dtype=np.uint8):
            if hiff_fitness(g) != _hiff_recursive(g.tolist()):
                bad = f"genome {_genome_text(g)}"
                break
        if bad:
            break
    report.add("hiff closed form and recursion, p<=8", bad is None, bad or "")


def _check_traps(report: OracleReport, rng: np.random.Generator) -> None:
    opt = enumerate_global_optima(make_problem("trapfive", 15))
    report.add("trap5 m=15 unique optimum", len(opt) == 1 and bool(opt[0].all()),
               f"optima={[_genome_text(g) for g in opt[:4]]}")
    counted = enumerate_trap5_local_optima(15)
    report.add("trap5 m=15 local optima 2^(m/5)-1", counted == count_trap5_local_optima(15) == 7,
               f"enumerated={counted}")
    bad = None
    for g in rng.integers(0, 2, (200, 60), dtype=np.uint8):
        if overlapping_trap5_fitness(g, 20) != _overfive_loop(g, 20):
            bad = f"genome {_genome_text(g)}"
            break
    report.add("overlapping trap5 vs loop oracle", bad is None, bad or "")


def _check_incremental(report: OracleReport, rng: np.random.Generator, sequences: int) -> None:
    bad = None
    for seq in range(sequences):
        n, m, k = int(rng.integers(4, 20)), int(rng.integers(1, 12)), int(rng.integers(1, 5))
        k = min(k, n)
        pop = rng.integers(0, 2, (n, m), dtype=np.uint8)
        state = initial_clustering(pop, k, rng)
        for _ in range(int(rng.integers(1, 30))):
            slot = int(rng.integers(n))
            state.remove(slot)
            state.insert(slot, rng.integers(0, 2, m, dtype=np.uint8))
            fresh = CountTable.from_population(state.genomes, state.labels, k)
            if fresh != state.counts:
                bad = f"sequence {seq}: counts differ from rebuild"
                break
            if np.any(fresh.sizes == 0) or (k > 1 and np.any(fresh.n - fresh.sizes == 0)):
                continue
            live = ModelPair.from_counts(state.counts, np.zeros(k))
            for est in (MLE, WILSON):
                p, w = rebuild_matrices(fresh, est)
                if not (np.allclose(live.proportions(est), p, atol=1e-9, rtol=0)
                        and np.allclose(live.information, w, atol=1e-9, rtol=0)):
                    bad = f"sequence {seq}: {est} matrices differ; labels={state.labels.tolist()}"
                    break
            if bad:
                break
        if bad:
            break
    report.add(f"incremental counts/matrices vs rebuild ({sequences} sequences)", bad is None, bad or "")


def _check_peaks(report: OracleReport, names: Sequence[str]) -> None:
    for name in names:
        problem = make_problem(name)
        count = len(enumerate_global_optima(problem))
        report.add(f"{name} enumerated peaks", count == problem.known_peak_count,
                   f"enumerated={count} registered={problem.known_peak_count}")


def validate_oracles(full: bool = False, sequences: int = 300, seed: int = 0) -> OracleReport:
    """Cross-check fitness functions, model bookkeeping and peak counts by brute force.

    ``full`` adds the 28-node graph enumerations, which take a while.
    """
    rng = np.random.default_rng(seed)
    report = OracleReport()
    _check_hiff(report, rng)
    _check_traps(report, rng)
    _check_incremental(report, rng, sequences)
    _check_peaks(report, ["Pgrid16"] + (["Pcat28", "Pcatring28"] if full else []))
    return report


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

_FLAG_DEFAULTS = {
    "problem": None, "size": None, "k": None, "n0": None, "nw": None,
    "pc": 0.5, "pold": 0.5, "pw": 0.5, "operator": combine.CG, "reps": 1, "seed": 0,
    "max_evals": DEFAULT_MAX_EVALS, "out": None, "trace": None,
    "param": None, "values": None, "reference": None, "full": False,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phipbil", description="Clustered linkage-learning EDA experiments")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON file of flag values; flags given here win")
        p.add_argument("--problem", choices=PROBLEM_NAMES)
        p.add_argument("--size", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--n0", type=int)
        p.add_argument("--nw", type=int)
        p.add_argument("--pc", type=float)
        p.add_argument("--pold", type=float)
        p.add_argument("--pw", type=float)
        p.add_argument("--operator", choices=combine.OPERATORS)
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--max-evals", dest="max_evals", type=int)
        p.add_argument("--out", type=Path)

    p = sub.add_parser("run", help="replicated runs of one configuration")
    common(p)
    p.add_argument("--trace", type=Path, help="line-delimited JSON trace per run")
    p = sub.add_parser("sweep", help="batches over values of one probability")
    common(p)
    p.add_argument("--param", choices=SWEEP_PARAMS)
    p.add_argument("--values", help="comma-separated values in [0, 1]")
    p = sub.add_parser("compare", help="run a batch and check it against a reference row")
    common(p)
    p.add_argument("--reference", help="row key, e.g. table3/phi-pbil/Pgrid16")
    p = sub.add_parser("validate", help="brute-force oracle checks")
    p.add_argument("--config", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--full", action="store_true", default=None, help="include 28-node graph enumerations")
    return parser


def _settings(args: argparse.Namespace) -> dict:
    """Values given explicitly: the config file, overridden by flags."""
    settings: dict = {}
    if getattr(args, "config", None) is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise OSError(f"cannot read config {args.config}: {e.strerror or e}") from e
        unknown = set(loaded) - set(_FLAG_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown keys in {args.config}: {', '.join(sorted(unknown))}")
        settings.update(loaded)
    settings.update({k: v for k, v in vars(args).items() if k in _FLAG_DEFAULTS and v is not None})
    return settings


_REFERENCE_FIELDS = {"problem": "problem", "size": "size", "n0": "n0", "nw": "nw", "k": "k",
                     "pc": "p_c", "pold": "p_old", "pw": "p_w", "operator": "operator",
                     "max_evals": "max_evals"}


def _resolve(settings: dict, reference: Optional[dict] = None) -> dict:
    """Explicit values win, then the reference row's settings, then built-in defaults."""
    ref = reference or {}
    out = dict(_FLAG_DEFAULTS)
    out.update({flag: ref[f] for flag, f in _REFERENCE_FIELDS.items() if f in ref})
    out.update(settings)
    return out


def _spec(s: dict) -> ExperimentSpec:
    for f in ("problem", "n0", "nw", "k"):
        if s[f] is None:
            raise ValueError(f"--{f.replace('_', '-')} is required")
    cfg = EngineConfig(n0=int(s["n0"]), nw=int(s["nw"]), k=int(s["k"]), p_c=float(s["pc"]),
                       p_old=float(s["pold"]), p_w=float(s["pw"]), max_evals=int(s["max_evals"]),
                       seed=int(s["seed"]), operator=s["operator"])
    return ExperimentSpec(s["problem"], s["size"], cfg, int(s["reps"]),
                          None if s["out"] is None else Path(s["out"]),
                          None if s.get("trace") is None else Path(s["trace"]))


def _parse_values(values) -> list[float]:
    if values is None:
        raise ValueError("--values is required")
    if isinstance(values, str):
        return [float(v) for v in values.split(",") if v.strip()]
    return [float(v) for v in values]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        s = _resolve(_settings(args))
        if args.command == "validate":
            report = validate_oracles(full=bool(s["full"]), seed=int(s["seed"]))
            print("\n".join(report.lines()))
            return 0 if report.passed else 1
        if args.command == "run":
            stats = run_batch(_spec(s))
            summary = {k: v for k, v in stats.summary().items() if k != "runs"}
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0
        if args.command == "sweep":
            if s["param"] is None:
                raise ValueError("--param is required")
            spec = _spec(s)
            report = parameter_sweep(spec.problem, spec.size, s["param"], _parse_values(s["values"]),
                                     spec.config, spec.replications, s["out"])
            sys.stdout.write(report.to_csv())
            return 0
        if args.command == "compare":
            if s["reference"] is None:
                raise ValueError("--reference is required")
            row = reference_row(s["reference"])
            spec = _spec(_resolve(_settings(args), row))
            verdict = compare_to_reference(run_batch(spec), row)
            print("\n".join(verdict.lines()))
            return 0 if verdict.passed else 1
    except (ValueError, KeyError, LookupError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
