"""Monte Carlo rejection-rate experiments.

A configuration expands into cells (one DGP parameter set and sample
size each). Every replication draws a fresh series from the stream
``replication_rng(master_seed, r)`` and applies all requested tests and
values of ``s`` to it. Counts are aggregated by summation, so a table
does not depend on how replications were split across workers.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from nonstat import dgp, robinson, stats
from nonstat.errors import DegenerateSeries, DomainError, LevinsonBreakdown
from nonstat.seeding import replication_rng

TESTS = ("Q", "Qtilde", "robinson", "robinson_prewhitened")
CSV_COLUMNS = ("dgp", "kind-params", "n", "d", "s", "test", "alpha", "rate", "se", "reps")
DESK_REPLICATIONS = 500
FULL_REPLICATIONS = 2000
CHUNK = 50


@dataclass
class McConfig:
    dgp_grid: list
    n_grid: list
    d_grid: list | None = None
    s_grid: list = field(default_factory=lambda: [10])
    s_by_n: dict | None = None
    tests: list = field(default_factory=lambda: ["Q"])
    replications: int = DESK_REPLICATIONS
    alpha: float = 0.05
    master_seed: int = 1
    workers: int = 1
    burn_in: int = 1000
    qmax: int = 3
    cell_time_budget: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be positive")
        if not self.dgp_grid or not self.n_grid:
            raise DomainError("dgp_grid and n_grid must be nonempty")
        if not self.s_grid and not self.s_by_n:
            raise DomainError("s_grid must be nonempty")
        if self.d_grid is not None and not self.d_grid:
            raise DomainError("d_grid must be nonempty when given")
        bad = set(self.tests) - set(TESTS)
        if not self.tests or bad:
            raise DomainError(f"tests must be a nonempty subset of {TESTS}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError("alpha must lie in (0, 1)")
        if self.workers < 1:
            raise DomainError("workers must be positive")
        if self.s_by_n is not None:
            self.s_by_n = {int(k): int(v) for k, v in self.s_by_n.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "McConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "McConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def s_values(self, n: int) -> list:
        if self.s_by_n and n in self.s_by_n:
            return [self.s_by_n[n]]
        return [int(s) for s in self.s_grid]


def _expand_template(template: dict) -> list[dict]:
    keys = sorted(template)
    values = [v if isinstance(v, list) else [v] for v in (template[k] for k in keys)]
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def cells(cfg: McConfig) -> list[dgp.DgpSpec]:
    """Expand the grid into DgpSpecs (seed left at 0; streams are per replication)."""
    out = []
    for template in cfg.dgp_grid:
        for params in _expand_template(template):
            kind = params.get("kind")
            uses_d = kind in ("farima", "break") or (kind == "aggregated" and "b" not in params)
            d_values = cfg.d_grid if (uses_d and cfg.d_grid is not None) else [None]
            for n, d in itertools.product(cfg.n_grid, d_values):
                p = dict(params, n=int(n), burn_in=cfg.burn_in)
                if d is not None:
                    if kind == "aggregated":
                        p["b"] = 2.0 - 2.0 * d
                    else:
                        p["d"] = d
                out.append(dgp.DgpSpec(**p))
    return out


@dataclass
class McRow:
    dgp: str
    params: dict
    n: int
    d: float
    s: int | None
    test: str
    alpha: float
    rejections: int
    anomalies: int
    replications: int
    partial: bool = False

    @property
    def effective(self) -> int:
        return self.replications - self.anomalies

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.effective if self.effective else math.nan

    @property
    def binomial_se(self) -> float:
        r = self.rejection_rate
        return math.sqrt(r * (1.0 - r) / self.effective) if self.effective else math.nan


@dataclass
class McTable:
    rows: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)

    def lookup(self, **kw) -> McRow:
        hits = [r for r in self.rows if all(getattr(r, k) == v for k, v in kw.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {kw}")
        return hits[0]


def _slots(cfg, n):
    out = []
    for test in cfg.tests:
        if test.startswith("robinson"):
            out.append((test, None))
        else:
            out.extend((test, s) for s in cfg.s_values(n))
    return out


def _run_chunk(spec, reps, slots, quantiles, alpha, master_seed, qmax):
    """Counts (rejections, anomalies) per slot over the given replication indices."""
    rej = np.zeros(len(slots), dtype=np.int64)
    bad = np.zeros(len(slots), dtype=np.int64)
    notes = []
    for r in reps:
        try:
            x = dgp.simulate(spec, replication_rng(master_seed, r))
        except LevinsonBreakdown as exc:
            bad += 1
            notes.append(f"rep {r}: {exc}")
            continue
        for i, (test, s) in enumerate(slots):
            try:
                if test.startswith("robinson"):
                    out = robinson.robinson_test(x, alpha, test.endswith("prewhitened"), qmax)
                    rej[i] += out.rejected
                else:
                    st = stats.q_statistic(x, s, test).statistic
                    rej[i] += st < quantiles[s]
            except DegenerateSeries as exc:
                bad[i] += 1
                notes.append(f"rep {r} {test}: {exc}")
    return rej, bad, notes


def run_cell(spec, cfg: McConfig, quantiles: dict, pool=None):
    slots = _slots(cfg, spec.n)
    rej = np.zeros(len(slots), dtype=np.int64)
    bad = np.zeros(len(slots), dtype=np.int64)
    notes = []
    chunks = [range(i, min(i + CHUNK, cfg.replications)) for i in range(0, cfg.replications, CHUNK)]
    args = (slots, quantiles, cfg.alpha, cfg.master_seed, cfg.qmax)
    done, partial, start = 0, False, time.monotonic()
    if pool is None:
        results = (_run_chunk(spec, c, *args) for c in chunks)
    else:
        results = pool.map(_run_chunk, itertools.repeat(spec), chunks, *(itertools.repeat(a) for a in args))
    for chunk, (r, b, nts) in zip(chunks, results):
        rej += r
        bad += b
        notes.extend(nts)
        done += len(chunk)
        if cfg.cell_time_budget is not None and time.monotonic() - start > cfg.cell_time_budget:
            partial = done < cfg.replications
            break
    rows = [
        McRow(spec.kind, spec.params(), spec.n, spec.implied_d, s, test, cfg.alpha,
              int(rej[i]), int(bad[i]), done, partial)
        for i, (test, s) in enumerate(slots)
    ]
    return rows, notes


def run_experiment(cfg: McConfig, progress=None) -> McTable:
    """Rejection rates for every cell, test and s in ``cfg``."""
    from nonstat.cache import null_quantile

    specs = cells(cfg)
    quantiles = {}
    if any(t in ("Q", "Qtilde") for t in cfg.tests):
        for s in sorted({s for spec in specs for s in cfg.s_values(spec.n)}):
            quantiles[s] = null_quantile(s, cfg.alpha)
    table = McTable()
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for spec in specs:
            rows, notes = run_cell(spec, cfg, quantiles, pool)
            table.rows.extend(rows)
            table.anomalies.extend(f"{spec.kind} {spec.params()} n={spec.n}: {m}" for m in notes)
            if progress is not None:
                progress(spec, rows)
    finally:
        if pool is not None:
            pool.shutdown()
    return table


def _format_params(params: dict) -> str:
    return ";".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())


def _parse_params(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(";")):
        k, v = item.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            out[k] = float(v)
    return out


def table_to_csv(table: McTable, path) -> Path:
    """Write rows in the fixed column order; rates and SEs to 6 decimals."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for r in table.rows:
                writer.writerow([
                    r.dgp, _format_params(r.params), r.n, f"{r.d:g}",
                    "" if r.s is None else r.s, r.test, f"{r.alpha:g}",
                    f"{r.rejection_rate:.6f}", f"{r.binomial_se:.6f}", r.effective,
                ])
    except OSError as exc:
        raise OSError(f"cannot write table to {path}: {exc}") from exc
    return path


def table_from_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["params"] = _parse_params(r.pop("kind-params"))
        r["n"] = int(r["n"])
        r["d"] = float(r["d"])
        r["s"] = int(r["s"]) if r["s"] else None
        r["alpha"] = float(r["alpha"])
        r["rate"] = float(r["rate"])
        r["se"] = float(r["se"])
        r["reps"] = int(r["reps"])
    return rows


def bundled_config(name: str) -> Path:
    """Path of a configuration shipped with the package (e.g. ``table1-desk``)."""
    path = Path(__file__).with_name("configs") / f"{name}.json"
    if not path.exists():
        available = sorted(p.stem for p in path.parent.glob("*.json"))
        raise DomainError(f"no bundled config {name!r}; available: {available}")
    return path
