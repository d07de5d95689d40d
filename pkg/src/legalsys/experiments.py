"""Monte Carlo experiments: success curves over p and the min-degree hitting time.

Every trial draws its graph and construction randomness from a seed derived
from the master seed, so reruns are byte-identical.  Reports carry their
full configuration.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .construction import AdjacentPairWarning, ConstructionError, ConstructionTranscript, MainParams, construct_colouring, construct_dense, construct_main
from .graph import Graph
from .legal import EXHAUSTIVE_RANK_CAP, LegalityCertificate, validate_moves, verify
from .random_models import gnp, process
from .rng import RandomStream, trial_seed

EXPERIMENT_SCHEMA = "legalsys.experiment/1"
METHODS = ("dense", "colouring", "main")

# knobs for the hitting-time experiment: at T2 the default D0 cut
# (degree <= log n / 100) is empty, so degree <= ~3 vertices are routed to D0
HITTING_TIME_PARAMS = MainParams(d0_threshold=0.5, d1_constant=0.1)


def run_method(g: Graph, method: str, rng: RandomStream, params: MainParams | None = None) -> ConstructionTranscript:
    if method == "dense":
        return construct_dense(g, rng)
    if method == "colouring":
        return construct_colouring(g, rng=rng)
    if method == "main":
        return construct_main(g, params, rng)
    raise ValueError(f"unknown method {method!r}")


def certify(g: Graph, tr: ConstructionTranscript, mode: str, rng: RandomStream) -> LegalityCertificate:
    """``mode`` may be ``auto``: exhaustive up to the rank cap, else sampled."""
    if mode == "auto":
        mode = "exhaustive" if tr.moves.rank <= EXHAUSTIVE_RANK_CAP else "sampled"
    return verify(g, tr.state, tr.moves, mode, rng=rng)


@dataclass
class Outcome:
    """One construct-and-verify attempt."""

    status: str  # "legal" | "counterexample" | "move_invalid" | construction error kind
    rank: int | None = None
    runtime: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.status == "legal"


def attempt(g: Graph, method: str, seed: int, verify_mode: str, params: MainParams | None = None) -> Outcome:
    stream = RandomStream(seed)
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            # adjacent-pair fallbacks are already listed in the transcript diagnostics
            warnings.simplefilter("ignore", AdjacentPairWarning)
            tr = run_method(g, method, stream.child("construct"), params)
    except ConstructionError as e:
        return Outcome(e.kind, runtime=time.perf_counter() - t0, detail=e.to_json())
    if validate_moves(g, tr.moves) is not None:
        return Outcome("move_invalid", tr.moves.rank, time.perf_counter() - t0)
    cert = certify(g, tr, verify_mode, stream.child("verify"))
    return Outcome(cert.verdict, tr.moves.rank, time.perf_counter() - t0, {"certificate": cert.to_json()})


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    columns: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(x) for x in r])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "schema": EXPERIMENT_SCHEMA,
            "experiment": self.kind,
            "config": self.config,
            "columns": self.columns,
            "rows": [[_fmt(x) for x in r] for r in self.rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


# ----------------------------------------------------------------------------
# success curve


def _curve_trial(args) -> Outcome:
    n, p, seed, method, verify_mode, params = args
    g = gnp(n, p, seed)
    return attempt(g, method, seed, verify_mode, params)


def experiment_success_curve(
    n: int,
    p_grid,
    trials: int,
    method: str = "main",
    *,
    master_seed: int = 0,
    absolute: bool = False,
    verify_mode: str = "auto",
    params: MainParams | None = None,
    timing: bool = False,
    workers: int = 1,
) -> ExperimentReport:
    """Success rate of ``method`` on G(n, p) for each p.

    ``p_grid`` is in units of ``log n / n`` unless ``absolute``.  Runtime is
    wall-clock and therefore only emitted with ``timing=True``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    unit = 1.0 if absolute else math.log(n) / n
    rows = []
    for gi, c in enumerate(p_grid):
        p = min(1.0, max(0.0, float(c) * unit))
        jobs = [(n, p, trial_seed(master_seed, gi, k), method, verify_mode, params) for k in range(trials)]
        outs = _map(_curve_trial, jobs, workers)
        wins = sum(o.success for o in outs)
        rate = wins / trials
        ranks = [o.rank for o in outs if o.rank is not None]
        row = [float(c), p, trials, wins, rate, math.sqrt(rate * (1 - rate) / trials),
               (sum(ranks) / len(ranks)) if ranks else None]
        if timing:
            row.append(sum(o.runtime for o in outs) / trials)
        rows.append(row)
    columns = ["p_units", "p", "trials", "successes", "success_rate", "stderr", "mean_rank"]
    if timing:
        columns.append("mean_runtime")
    config = {"n": n, "p_grid": [float(c) for c in p_grid], "absolute": absolute, "trials": trials,
              "method": method, "master_seed": master_seed, "verify": verify_mode,
              "params": (params or MainParams()).to_json() if method == "main" else None}
    return ExperimentReport("success_curve", config, columns, rows)


# ----------------------------------------------------------------------------
# hitting time


def _hitting_trial(args) -> list:
    n, seed, verify_mode, params = args
    tr = process(n, seed)
    before = tr.graph_at(tr.t2 - 1)
    # min degree <= 1 on n >= 4 vertices rules out any legal system
    if before.min_degree() > 1:
        raise RuntimeError("trace is inconsistent: min degree already 2 before T2")
    g = tr.graph_at(tr.t2)
    out = attempt(g, "main", seed, verify_mode, params)
    return [seed, tr.t2, "no", "yes" if out.success else "no", out.status]


def experiment_hitting_time(
    n: int,
    trials: int,
    *,
    master_seed: int = 0,
    verify_mode: str = "sampled",
    params: MainParams | None = None,
    workers: int = 1,
) -> ExperimentReport:
    if n < 16:
        raise ValueError("hitting-time experiment needs n >= 16")
    params = params or HITTING_TIME_PARAMS
    jobs = [(n, trial_seed(master_seed, k), verify_mode, params) for k in range(trials)]
    rows = _map(_hitting_trial, jobs, workers)
    config = {"n": n, "trials": trials, "master_seed": master_seed, "verify": verify_mode,
              "params": params.to_json()}
    return ExperimentReport("hitting_time", config,
                            ["seed", "T2", "verdict_at_T2_minus_1", "verdict_at_T2", "outcome"], rows)


def success_rate(report: ExperimentReport) -> tuple[float, float]:
    """Rate of ``yes`` at T2 and its standard error."""
    col = report.column("verdict_at_T2")
    k = len(col)
    rate = sum(v == "yes" for v in col) / k
    return rate, math.sqrt(rate * (1 - rate) / k)
