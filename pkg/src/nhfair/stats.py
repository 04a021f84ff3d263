"""Seed aggregation and cross-method rank statistics.

Methods are compared across datasets (the blocks) on the mean of a
chosen metric: each dataset ranks the methods (rank 1 = best under the
metric's direction, ties averaged), the Friedman statistic tests whether
mean ranks differ, and the Nemenyi critical difference says how far two
mean ranks must be apart to call them different. Methods whose mean
ranks sit closer than the CD form "cliques" that a critical-difference
plot joins with a bar.

Metric directions are fixed here (gap: lower is better; everything
else: higher is better) so a silent direction flip cannot invert the
conclusions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMatrix,
    DuplicateSeed,
    MissingCell,
    UnsupportedAlpha,
    UnsupportedK,
)
from .metrics import MetricReport
from .records import RunManifest

METRIC_NAMES = ("utility", "worst", "gap", "eqodd", "dp")

METRIC_DIRECTIONS = {
    "utility": "higher_better",
    "worst": "higher_better",
    "gap": "lower_better",
    "eqodd": "higher_better",
    "dp": "higher_better",
}

# Critical values q_alpha(k) for the Nemenyi test, k = 2..20. These are
# studentized-range quantiles at infinite degrees of freedom divided by
# sqrt(2), embedded so results do not depend on a stats library version.
_Q_TABLE = {
    0.05: (
        1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320,
        3.030879, 3.101730, 3.163684, 3.218654, 3.268004, 3.312739,
        3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073,
        3.543799,
    ),
    0.10: (
        1.644854, 2.051965, 2.291341, 2.459516, 2.588521, 2.692732,
        2.779884, 2.854606, 2.919889, 2.977768, 3.029694, 3.076733,
        3.119693, 3.159199, 3.195743, 3.229723, 3.261461, 3.291224,
        3.319233,
    ),
}


@dataclass(frozen=True)
class AggregateCell:
    """Mean and sample std of one metric for one (method, dataset)."""

    method: str
    dataset: str
    metric: str
    mean: float
    std: float
    n_seeds: int
    split: str = ""


@dataclass(frozen=True)
class RankMatrix:
    methods: tuple[str, ...]
    blocks: tuple[str, ...]
    ranks: np.ndarray  # (N, k), average ranks for ties
    direction: str

    @property
    def k(self) -> int:
        return len(self.methods)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var**0.5


def aggregate(reports: list[tuple[MetricReport, RunManifest]]) -> list[AggregateCell]:
    """Collapse per-seed reports into mean/std cells per (method, dataset).

    Runs are grouped by (method, dataset, split); seeds must be distinct
    within a group. Std is the sample standard deviation (n - 1), zero
    for a single seed.
    """
    groups: dict[tuple[str, str, str], list[tuple[int, MetricReport]]] = {}
    for report, manifest in reports:
        key = (manifest.method, manifest.dataset, manifest.split)
        groups.setdefault(key, []).append((manifest.seed, report))

    cells: list[AggregateCell] = []
    for key in sorted(groups):
        method, dataset, split = key
        entries = groups[key]
        seeds = [seed for seed, _ in entries]
        if len(set(seeds)) != len(seeds):
            dup = sorted({s for s in seeds if seeds.count(s) > 1})
            raise DuplicateSeed(
                f"duplicate seed(s) {dup} for method={method} dataset={dataset} split={split}"
            )
        for metric in METRIC_NAMES:
            values = [rep.as_dict()[metric] for _, rep in sorted(entries, key=lambda e: e[0])]
            mean, std = _mean_std(values)  # type: ignore[arg-type]
            cells.append(
                AggregateCell(
                    method=method,
                    dataset=dataset,
                    metric=metric,
                    mean=mean,
                    std=std,
                    n_seeds=len(values),
                    split=split,
                )
            )
    return cells


def _average_ranks(values: list[float], higher_better: bool) -> list[float]:
    """Rank 1 = best; tied values share their average rank."""
    k = len(values)
    keyed = sorted(range(k), key=lambda j: (-values[j] if higher_better else values[j], j))
    ranks = [0.0] * k
    i = 0
    while i < k:
        j = i
        while j + 1 < k and values[keyed[j + 1]] == values[keyed[i]]:
            j += 1
        avg = (i + 1 + j + 1) / 2.0
        for pos in range(i, j + 1):
            ranks[keyed[pos]] = avg
        i = j + 1
    return ranks


def rank_matrix(
    cells: list[AggregateCell], metric: str, direction: str | None = None
) -> RankMatrix:
    """Rank method means per dataset for one metric.

    Every (method, dataset) cell must be present; a hole raises
    MissingCell naming it, matching the convention of dropping a method
    from the comparison rather than imputing.
    """
    if direction is None:
        if metric not in METRIC_DIRECTIONS:
            raise ValueError(f"no default direction for metric {metric!r}")
        direction = METRIC_DIRECTIONS[metric]
    if direction not in ("lower_better", "higher_better"):
        raise ValueError(f"bad direction {direction!r}")

    table: dict[tuple[str, str], float] = {}
    methods: list[str] = []
    blocks: list[str] = []
    for cell in cells:
        if cell.metric != metric:
            continue
        key = (cell.method, cell.dataset)
        if key in table:
            raise MissingCell(
                f"duplicate cell for method={cell.method} dataset={cell.dataset}; "
                "pass a single table per comparison"
            )
        table[key] = cell.mean
        if cell.method not in methods:
            methods.append(cell.method)
        if cell.dataset not in blocks:
            blocks.append(cell.dataset)
    if len(methods) < 2 or len(blocks) < 1:
        raise DegenerateMatrix(
            f"need at least 2 methods and 1 dataset for metric {metric!r}, "
            f"got {len(methods)} and {len(blocks)}"
        )
    for m in methods:
        for b in blocks:
            if (m, b) not in table:
                raise MissingCell(f"method {m!r} has no cell for dataset {b!r}")

    higher = direction == "higher_better"
    ranks = np.array(
        [_average_ranks([table[(m, b)] for m in methods], higher) for b in blocks],
        dtype=float,
    )
    return RankMatrix(
        methods=tuple(methods), blocks=tuple(blocks), ranks=ranks, direction=direction
    )


def mean_ranks(m: RankMatrix) -> dict[str, float]:
    means: dict[str, float] = {}
    for j, method in enumerate(m.methods):
        means[method] = sum(float(m.ranks[i, j]) for i in range(m.n_blocks)) / m.n_blocks
    return means


def _tie_correction(m: RankMatrix) -> float:
    """1 - sum(t^3 - t) / (N k (k^2 - 1)); 1.0 when no ties."""
    total = 0
    for i in range(m.n_blocks):
        row = [float(v) for v in m.ranks[i]]
        for value in set(row):
            t = row.count(value)
            total += t**3 - t
    return 1.0 - total / (m.n_blocks * m.k * (m.k**2 - 1))


def friedman(m: RankMatrix, tie_corrected: bool = False) -> tuple[float, int]:
    """Friedman chi-square over the rank matrix, df = k - 1.

    statistic = 12 N / (k (k+1)) * sum_j rbar_j^2 - 3 N (k+1)

    The default is the classical statistic; ``tie_corrected`` divides by
    the standard tie-correction factor, which is undefined when every
    block is fully tied.
    """
    if m.k < 2 or m.n_blocks < 2:
        raise DegenerateMatrix(f"need k >= 2 and N >= 2, got k={m.k}, N={m.n_blocks}")
    k = m.k
    n = m.n_blocks
    means = mean_ranks(m)
    sum_sq = sum(means[method] ** 2 for method in m.methods)
    # Grouped so the fully tied case cancels exactly in float arithmetic.
    statistic = (12.0 * n * sum_sq) / (k * (k + 1)) - 3.0 * n * (k + 1)
    if tie_corrected:
        c = _tie_correction(m)
        if c == 0.0:
            raise DegenerateMatrix("every block fully tied; tie-corrected statistic undefined")
        statistic /= c
    return statistic, k - 1


def nemenyi_cd(k: int, n_blocks: int, alpha: float = 0.05) -> float:
    """Critical difference q_alpha(k) * sqrt(k (k+1) / (6 N))."""
    if alpha not in _Q_TABLE:
        raise UnsupportedAlpha(f"alpha must be one of {sorted(_Q_TABLE)}, got {alpha}")
    if not 2 <= k <= 20:
        raise UnsupportedK(f"k must be in [2, 20], got {k}")
    if n_blocks < 1:
        raise DegenerateMatrix(f"need at least one block, got {n_blocks}")
    q = _Q_TABLE[alpha][k - 2]
    return q * (k * (k + 1) / (6.0 * n_blocks)) ** 0.5


def cliques(ranks: dict[str, float], cd: float) -> list[tuple[str, ...]]:
    """Maximal runs of rank-sorted methods spanning less than the CD.

    Only multi-method cliques are reported, and a clique contained in a
    larger one is suppressed.
    """
    ordered = sorted(ranks, key=lambda name: (ranks[name], name))
    values = [ranks[name] for name in ordered]
    spans: list[tuple[int, int]] = []
    for i in range(len(ordered)):
        j = i
        while j + 1 < len(ordered) and values[j + 1] - values[i] < cd:
            j += 1
        if j > i:
            spans.append((i, j))
    maximal = [
        (i, j)
        for (i, j) in spans
        if not any((a <= i and j <= b) and (a, b) != (i, j) for (a, b) in spans)
    ]
    return [tuple(ordered[i : j + 1]) for i, j in maximal]
