"""Random-graph scaling benchmark.

For each photon number, Erdős–Rényi graphs are sampled, solved in identity
ordering, and their metrics are averaged. A seeded random tenth of the trials
in each size bucket is also run through the verifier: all measurement
branches when there are at most ``samples`` of them, ``samples`` random
branches otherwise.

Each trial draws its graph from a seed derived from ``(seed, n_p, trial)``
with :class:`numpy.random.SeedSequence`, so results do not depend on worker
count or completion order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphs import erdos_renyi, graph_stabilizers
from .solver import solve
from .verify import verify

__all__ = ["TrialResult", "run_trial", "bench", "summarize", "to_csv", "trial_seed", "METRICS"]

METRICS = ("h_max", "measurements", "emitter_cnots", "total_gates")


@dataclass(frozen=True)
class TrialResult:
    n_photons: int
    trial: int
    h_max: int
    measurements: int
    emitter_cnots: int
    total_gates: int
    verified: bool | None  # None when the trial was not selected for verification


def trial_seed(seed: int, n_photons: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, n_photons, trial]).generate_state(1, np.uint64)[0])


def _verified_trials(seed: int, n_photons: int, trials: int, fraction: float) -> set[int]:
    k = min(trials, max(1, math.ceil(fraction * trials))) if fraction > 0 else 0
    rng = np.random.default_rng([seed, n_photons, 0xBE7C4])
    return set(int(t) for t in rng.choice(trials, size=k, replace=False))


def run_trial(args: tuple) -> TrialResult:
    n, p, seed, trial, check, samples = args
    s = trial_seed(seed, n, trial)
    target = graph_stabilizers(erdos_renyi(n, p, s))
    circuit = solve(target)
    c = circuit.counts
    # spot check: every branch when there are at most ``samples`` of them
    limit = max(0, samples.bit_length() - 1)
    ok = (verify(circuit, target, enumerate_limit=limit, samples=samples, seed=s).passed
          if check else None)
    return TrialResult(n, trial, circuit.metadata["h_max"], c.measurements, c.emitter_cnots,
                       c.total_gates, ok)


def bench(sizes: Sequence[int], p: float = 0.95, trials: int = 128, seed: int = 0, *,
          verify_fraction: float = 0.1, samples: int = 8, workers: int = 1) -> list[TrialResult]:
    """Run all trials; results are ordered by ``(n_p, trial)``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    jobs = []
    for n in sizes:
        checked = _verified_trials(seed, n, trials, verify_fraction)
        jobs += [(n, p, seed, t, t in checked, samples) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(run_trial, jobs, chunksize=4))
    return [run_trial(j) for j in jobs]


def summarize(results: Iterable[TrialResult]) -> list[dict]:
    """One row per size: mean and population standard deviation of each metric."""
    by_size: dict[int, list[TrialResult]] = {}
    for r in results:
        by_size.setdefault(r.n_photons, []).append(r)
    rows = []
    for n, rs in sorted(by_size.items()):
        row: dict = {"n_p": n, "trials": len(rs)}
        for m in METRICS:
            v = np.array([getattr(r, m) for r in rs], dtype=float)
            row[f"{m}_mean"] = float(v.mean())
            row[f"{m}_std"] = float(v.std())
        checked = [r.verified for r in rs if r.verified is not None]
        row["verified"] = len(checked)
        row["verify_failures"] = checked.count(False)
        rows.append(row)
    return rows


def to_csv(rows: Sequence[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
