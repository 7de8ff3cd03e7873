"""Seeded multi-trial experiments and their JSON/CSV reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (
    RandomGraphSpec,
    alpha_schedule,
    alpha_schedule_s2,
    quadrilaterals,
    random_bipartite,
    union_bound_s2,
)
from .errors import MalformedInputError, SchemaError
from .graph import COL, ROW, BipartiteSet, read_edge_list, rudin_sup
from .sigma import (
    density_check,
    erdos_check,
    pisier_trail_bound,
    proven_constant,
    ratio_constant_estimate,
)

SCHEMA = "sigma-p-report/1"
KINDS = ("scaling", "zarankiewicz", "pisier-consistency", "density-sweep", "erdos")
CSV_COLUMNS = ("kind", "m", "n", "trial", "seed", "size", "sup_c", "d_est", "bound", "holds")
WORKERS_ENV = "SIGMAP_WORKERS"


def report_schema_version() -> str:
    return SCHEMA


@dataclass
class ExperimentConfig:
    """Parameters of a batch experiment.

    ``grid`` lists ``(m, n)`` class sizes (m columns, n rows); ``graphs``
    lists edge-list files or family specs like ``"quadrilaterals:3"`` and
    replaces the random graphs where the kind allows it.
    """

    kind: str
    grid: list = field(default_factory=list)
    graphs: list = field(default_factory=list)
    trials: int = 1
    seed: int = 0
    s: int = 2
    epsilon: float = 0.0
    l: int = 3
    alpha: float | None = None
    D: float | None = None
    samples: int = 50
    restarts: int = 8
    iterations: int = 200
    estimate: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MalformedInputError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise MalformedInputError("trials must be >= 1")
        self.grid = [tuple(int(v) for v in point) for point in self.grid]
        if not self.grid and not self.graphs:
            raise MalformedInputError("experiment grid is empty")
        if self.s < 2:
            raise MalformedInputError("s must be >= 2")

    @property
    def p(self) -> int:
        return 2 * self.s

    def to_json(self) -> dict:
        d = asdict(self)
        d["grid"] = [list(pt) for pt in self.grid]
        return d

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise MalformedInputError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass
class ExperimentReport:
    config: dict
    records: list
    aggregates: dict
    tool_version: str = __version__
    wall_time: float = 0.0
    schema: str = SCHEMA

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.get("holds") is False]

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "config": self.config,
            "records": self.records,
            "aggregates": self.aggregates,
            "wall_time": self.wall_time,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            writer.writerow({k: ("" if rec.get(k) is None else rec.get(k)) for k in CSV_COLUMNS})
        return buf.getvalue()


def parse_report(text: str) -> ExperimentReport:
    data = json.loads(text)
    schema = data.get("schema")
    if schema != SCHEMA:
        raise SchemaError(f"unsupported report schema {schema!r} (expected {SCHEMA!r})")
    return ExperimentReport(
        config=data["config"],
        records=data["records"],
        aggregates=data["aggregates"],
        tool_version=data["tool_version"],
        wall_time=data["wall_time"],
        schema=schema,
    )


def trial_seed(base: int, point: int, trial: int) -> int:
    """Per-trial seed derived from (base seed, grid index, trial index)."""
    return int(np.random.SeedSequence([base, point, trial]).generate_state(1, np.uint64)[0])


def load_graph(spec: str) -> BipartiteSet:
    """An edge-list path or a ``family:arg`` spec."""
    if spec.startswith("quadrilaterals:"):
        return quadrilaterals(int(spec.split(":", 1)[1]))
    return read_edge_list(spec)


# ---------------------------------------------------------------------------
# Per-trial work


def _oriented(m, n):
    return (m, n) if m >= n else (n, m)


def _random_graph(cfg: ExperimentConfig, m, n, seed, alpha):
    return random_bipartite(RandomGraphSpec(m, n, alpha, seed, cfg.s, cfg.epsilon))


def _estimate(cfg, G, seed):
    if not cfg.estimate or len(G) == 0:
        return None
    est = ratio_constant_estimate(G, cfg.p, cfg.restarts, cfg.iterations, seed=seed % 2**32)
    return est.value


def _trial(task):
    cfg, point, trial = task
    cfg = ExperimentConfig.from_json(cfg)
    seed = trial_seed(cfg.seed, point, trial)
    if point < len(cfg.grid):
        m, n = cfg.grid[point]
        G = None
    else:
        G = load_graph(cfg.graphs[point - len(cfg.grid)])
        m, n = G.n_cols, G.n_rows
    rec = {"kind": cfg.kind, "m": m, "n": n, "trial": trial, "seed": seed}

    if cfg.kind == "scaling":
        big, small = _oriented(m, n)
        alpha = cfg.alpha if cfg.alpha is not None else alpha_schedule(cfg.s, big, small, cfg.epsilon)
        if G is None:
            G = _random_graph(cfg, m, n, seed, alpha)
        sup_c = rudin_sup(G, cfg.s, COL).sup
        d_est = _estimate(cfg, G, seed)
        bound = pisier_trail_bound(sup_c, cfg.p)
        rec.update(alpha=alpha, expected=m * n * alpha, size=len(G), sup_c=sup_c, d_est=d_est, bound=bound)
        rec["holds"] = None if d_est is None else d_est <= bound + 1e-6

    elif cfg.kind == "zarankiewicz":
        big, small = _oriented(m, n)
        alpha = cfg.alpha if cfg.alpha is not None else alpha_schedule_s2(big, small, cfg.l)
        if G is None:
            G = _random_graph(cfg, m, n, seed, alpha)
        sup_c = rudin_sup(G, 2, COL).sup
        rec.update(
            alpha=alpha,
            expected=m * n * alpha,
            size=len(G),
            sup_c=sup_c,
            hit=sup_c >= cfg.l,
            union_bound=union_bound_s2(big, small, cfg.l, alpha),
            d_est=None,
            bound=None,
            holds=None,
        )

    elif cfg.kind == "pisier-consistency":
        if G is None:
            alpha = 0.3 if cfg.alpha is None else cfg.alpha
            G = _random_graph(cfg, m, n, seed, alpha)
        sup_c = rudin_sup(G, cfg.s, COL).sup
        sup_r = rudin_sup(G, cfg.s, ROW).sup
        bound = min(pisier_trail_bound(sup_c, cfg.p), pisier_trail_bound(sup_r, cfg.p))
        d_est = None
        if len(G):
            est = ratio_constant_estimate(G, cfg.p, cfg.restarts, cfg.iterations, seed=seed % 2**32)
            d_est = est.value
        rec.update(size=len(G), sup_c=sup_c, sup_r=sup_r, d_est=d_est, bound=bound)
        rec["holds"] = True if d_est is None else d_est <= bound + 1e-6

    elif cfg.kind == "density-sweep":
        if G is None:
            alpha = 0.3 if cfg.alpha is None else cfg.alpha
            G = _random_graph(cfg, m, n, seed, alpha)
        D = cfg.D if cfg.D is not None else proven_constant(G, cfg.p)
        rep = density_check(G, cfg.p, D, samples=cfg.samples, seed=seed % 2**32)
        worst = max((v["size"] / v["bound"] for v in rep.checked), default=0.0)
        rec.update(size=len(G), D=D, checked=len(rep.checked), violations=len(rep.violations))
        rec.update(sup_c=None, d_est=None, bound=D, worst_ratio=worst, holds=rep.holds)

    elif cfg.kind == "erdos":
        if G is None:
            alpha = 0.1 if cfg.alpha is None else cfg.alpha
            G = _random_graph(cfg, m, n, seed, alpha)
        res = erdos_check(G, cfg.p)
        rec.update(size=len(G), sup_c=None, d_est=None, margin=res.value, bound=res.bound)
        rec["holds"] = res.holds
        if res.holds is None:
            rec["skipped"] = "graph has a circuit of length p"
    return rec


# ---------------------------------------------------------------------------
# Aggregation


def _loglog_slope(xs, ys):
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        return None
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return {"mean": None, "std": None, "max": None}
    arr = np.asarray(vals, dtype=float)
    return {"mean": float(arr.mean()), "std": float(arr.std()), "max": float(arr.max())}


def aggregate(cfg: ExperimentConfig, records: list) -> dict:
    by_point: dict = {}
    for rec in records:
        by_point.setdefault((rec["m"], rec["n"]), []).append(rec)
    points = []
    for (m, n), recs in by_point.items():
        entry = {
            "m": m,
            "n": n,
            "trials": len(recs),
            "size": _stats(r.get("size") for r in recs),
            "sup_c": _stats(r.get("sup_c") for r in recs),
            "d_est": _stats(r.get("d_est") for r in recs),
            "failures": sum(r.get("holds") is False for r in recs),
        }
        if "expected" in recs[0]:
            entry["expected_size"] = recs[0]["expected"]
        if cfg.kind == "zarankiewicz":
            freq = sum(r["hit"] for r in recs) / len(recs)
            ub = recs[0]["union_bound"]
            entry.update(hit_frequency=freq, union_bound=ub, frequency_within_bound=freq <= ub)
        points.append(entry)
    out = {"points": points, "failures": sum(p["failures"] for p in points)}
    if cfg.kind in ("scaling", "zarankiewicz"):
        xs = [min(p["m"], p["n"]) for p in points]
        ys = [p["size"]["mean"] for p in points]
        out["loglog_slope_size_vs_min"] = _loglog_slope(xs, ys)
    return out


def _workers(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise MalformedInputError(f"{WORKERS_ENV} must be an integer") from None


def run(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Execute every (grid point, trial) pair and aggregate the records.

    Records come back in task order whatever the worker count, so the
    report is reproducible from the config alone (apart from wall_time).
    """
    t0 = time.perf_counter()
    cfg_json = config.to_json()
    n_points = len(config.grid) + len(config.graphs)
    tasks = [(cfg_json, pt, t) for pt in range(n_points) for t in range(config.trials)]
    nw = _workers(workers)
    if nw == 1:
        records = [_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(nw) as pool:
            records = list(pool.map(_trial, tasks, chunksize=max(1, len(tasks) // (4 * nw))))
    report = ExperimentReport(cfg_json, records, aggregate(config, records))
    report.wall_time = time.perf_counter() - t0
    return report
