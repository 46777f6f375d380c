"""Exhaustive and Monte Carlo evaluation of two-step testing plans.

Exhaustive mode enumerates every (true formation, patient zero) pair through
the full encode/decode pipeline and reports the exact expected number of
false classifications; Monte Carlo mode samples the same pipeline with a
counter-based generator so reports are reproducible across runs and worker
counts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Optional

import numpy as np

from .errors import TooLarge
from .model import FormationEnsemble
from .sampling import SamplingPlan
from .separable import DecodeTable, TestMatrix, decode
from .tree import FormationTree

MAX_EXHAUSTIVE = 10 ** 6
RNG_ID = "philox4x64(numpy)"
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimReport:
    """One evaluation outcome; exhaustive fills exact_ef, Monte Carlo the
    empirical fields."""

    m: int
    t_rows: int
    mode: str  # "exhaustive" | "monte_carlo"
    trials: int
    exact_ef: Optional[Fraction] = None
    empirical_ef_mean: Optional[float] = None
    empirical_ef_ci95: Optional[float] = None
    seed: Optional[int] = None
    rng: Optional[str] = None
    workers: int = 1

    CSV_HEADER = (
        "m,T,mode,trials,exact_ef,empirical_ef_mean,empirical_ef_ci95,seed,rng,workers"
    )

    def csv_row(self, fmt) -> str:
        vals = [
            str(self.m), str(self.t_rows), self.mode, str(self.trials),
            fmt(self.exact_ef), fmt(self.empirical_ef_mean),
            fmt(self.empirical_ef_ci95),
            "" if self.seed is None else str(self.seed),
            self.rng or "", str(self.workers),
        ]
        return ",".join(vals)

    def kv_lines(self, fmt) -> list:
        pairs = [
            ("m", str(self.m)), ("T", str(self.t_rows)), ("mode", self.mode),
            ("trials", str(self.trials)),
        ]
        if self.exact_ef is not None:
            pairs.append(("exact_ef", fmt(self.exact_ef)))
        if self.empirical_ef_mean is not None:
            pairs.append(("empirical_ef_mean", fmt(self.empirical_ef_mean)))
            pairs.append(("empirical_ef_ci95", fmt(self.empirical_ef_ci95)))
        if self.seed is not None:
            pairs.append(("seed", str(self.seed)))
            pairs.append(("rng", self.rng or ""))
        pairs.append(("workers", str(self.workers)))
        return [f"{k}: {v}" for k, v in pairs]


def _ensemble_of(tree_or_ens) -> FormationEnsemble:
    if isinstance(tree_or_ens, FormationTree):
        return tree_or_ens.ensemble
    return tree_or_ens


def _error_cases(tree_or_ens, plan: SamplingPlan, matrix: TestMatrix,
                 table: DecodeTable):
    """Per formation, per true infected cluster: (cluster size, errors).

    Runs the real pipeline (pool the representatives, decode, expand) for
    every possible infected cluster; patient zero only enters through which
    cluster is infected, with weight |cluster|/n.
    """
    ens = _ensemble_of(tree_or_ens)
    form_m = ens.formations[plan.m - 1]
    lab_m = form_m.labels()
    sizes_m = [len(c) for c in form_m.clusters]
    out = []
    for form_a in ens.formations:
        lab_a = form_a.labels()
        sigma_a = form_a.sigma
        inter = [[0] * form_m.sigma for _ in range(sigma_a)]
        for v in range(1, ens.n + 1):
            inter[lab_a[v]][lab_m[v]] += 1
        rows = []
        for ca, cluster_a in enumerate(form_a.clusters):
            y = 0
            for j, rep in enumerate(plan.selected):
                if lab_a[rep] == ca:
                    y |= matrix.columns[j]
            k_hat = decode(table, y)
            errs = 0
            row = inter[ca]
            for j, rep in enumerate(plan.selected):
                if rep in k_hat:
                    errs += sizes_m[j] - row[j]
                else:
                    errs += row[j]
            rows.append((len(cluster_a), errs))
        out.append(rows)
    return out


def evaluate_exhaustive(tree_or_ens, plan: SamplingPlan, matrix: TestMatrix,
                        table: DecodeTable) -> SimReport:
    """Exact expected false classifications by full (alpha, Z) enumeration."""
    ens = _ensemble_of(tree_or_ens)
    if ens.f * ens.n > MAX_EXHAUSTIVE:
        raise TooLarge(f"f*n = {ens.f * ens.n} exceeds {MAX_EXHAUSTIVE}")
    cases = _error_cases(tree_or_ens, plan, matrix, table)
    # Exact Fraction when the ensemble probabilities are exact; float otherwise.
    total = Fraction(0)
    for p, rows in zip(ens.probs, cases):
        weighted = sum(size * errs for size, errs in rows)
        total = total + p * Fraction(weighted, ens.n)
    return SimReport(
        m=plan.m, t_rows=matrix.t_rows, mode="exhaustive",
        trials=ens.f * ens.n, exact_ef=total,
    )


def evaluate_monte_carlo(tree_or_ens, plan: SamplingPlan, matrix: TestMatrix,
                         table: DecodeTable, trials: int, seed: int,
                         workers: int = 1) -> SimReport:
    """Sampled estimate of the expected false classifications.

    Draws (formation, patient zero) i.i.d. with a Philox counter-based
    generator keyed by ``seed``; all draws precede evaluation and chunk
    boundaries are fixed, so results are identical for any worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ens = _ensemble_of(tree_or_ens)
    cases = _error_cases(tree_or_ens, plan, matrix, table)

    n = ens.n
    max_sigma = max(form.sigma for form in ens.formations)
    err_table = np.zeros((ens.f, max_sigma), dtype=np.float64)
    for a, rows in enumerate(cases):
        for ca, (_size, errs) in enumerate(rows):
            err_table[a, ca] = float(errs)
    labels = np.zeros((ens.f, n), dtype=np.int32)
    for a, form in enumerate(ens.formations):
        lab = form.labels()
        labels[a, :] = [lab[v] for v in range(1, n + 1)]

    cum = np.cumsum(np.asarray([float(p) for p in ens.probs]))
    cum[-1] = 1.0

    gen = np.random.Generator(np.random.Philox(key=seed))
    u = gen.random(trials)
    z = gen.integers(0, n, size=trials)
    alpha_idx = np.searchsorted(cum, u, side="right").astype(np.int32)
    np.clip(alpha_idx, 0, ens.f - 1, out=alpha_idx)
    values = err_table[alpha_idx, labels[alpha_idx, z]]

    starts = list(range(0, trials, _CHUNK))

    def chunk_sums(start):
        part = values[start:start + _CHUNK]
        return float(part.sum()), float(np.square(part).sum())

    if workers <= 1:
        parts = [chunk_sums(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk_sums, starts))

    sx = 0.0
    sx2 = 0.0
    for a, b in parts:  # fixed chunk order keeps reduction deterministic
        sx += a
        sx2 += b
    mean = sx / trials
    if trials > 1:
        var = max(0.0, (sx2 - trials * mean * mean) / (trials - 1))
    else:
        var = 0.0
    ci95 = 1.96 * sqrt(var / trials)
    return SimReport(
        m=plan.m, t_rows=matrix.t_rows, mode="monte_carlo", trials=trials,
        empirical_ef_mean=mean, empirical_ef_ci95=ci95, seed=seed,
        rng=RNG_ID, workers=workers,
    )
