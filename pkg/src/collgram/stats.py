"""Paired comparisons of profile indices between translator sets.

Differences are always ``second - first`` (column translator minus row
translator).  Student's t CDF is computed from the regularized incomplete
beta function, evaluated with a modified Lentz continued fraction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, NamedTuple, Sequence

from collgram.assoc import DocumentProfile
from collgram.errors import AlignmentError, CollgramError, DegenerateSample, InsufficientPairs

log = logging.getLogger(__name__)

INDEX_NAMES = ("pct_high_mi", "pct_high_t", "ratio")

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for I_x(a, b); converges fast for x < (a+1)/(a+b+2).
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, one_minus_x: float | None = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``.

    ``one_minus_x`` may be passed when ``1 - x`` is known more precisely
    than the subtraction would give.
    """
    if one_minus_x is None:
        one_minus_x = 1.0 - x
    if x <= 0.0:
        return 0.0
    if one_minus_x <= 0.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(one_minus_x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, one_minus_x) / b


def t_cdf(t: float, df: int) -> float:
    """Cumulative distribution function of Student's t with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if t == 0:
        return 0.5
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    t2 = t * t
    denom = df + t2
    tail = 0.5 * betainc(df / 2.0, 0.5, df / denom, t2 / denom)
    return 1.0 - tail if t > 0 else tail


def t_sf_two_tailed(t: float, df: int) -> float:
    """``2 * (1 - t_cdf(|t|, df))`` without the cancellation for large |t|."""
    if t == 0:
        return 1.0
    t2 = t * t
    denom = df + t2
    return betainc(df / 2.0, 0.5, df / denom, t2 / denom)


def bonferroni_threshold(alpha: float, m: int) -> float:
    if not 0 < alpha < 1:
        raise CollgramError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 1:
        raise CollgramError(f"number of tests must be positive, got {m}")
    return alpha / m


def _usable_diffs(x: Sequence[float | None], y: Sequence[float | None]) -> tuple[list[float], int]:
    if len(x) != len(y):
        raise CollgramError(f"paired samples differ in length ({len(x)} vs {len(y)})")
    diffs = [b - a for a, b in zip(x, y) if a is not None and b is not None]
    return diffs, len(x) - len(diffs)


def _mean_sd(diffs: list[float]) -> tuple[float, float]:
    n = len(diffs)
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    return mean, math.sqrt(var)


def _all_equal(diffs):
    return all(d == diffs[0] for d in diffs)


class TTestResult(NamedTuple):
    t_stat: float
    df: int
    p_two_tailed: float


def paired_t_test(x: Sequence[float | None], y: Sequence[float | None]) -> TTestResult:
    """Student's t-test for paired measures on ``y - x``.

    Pairs where either value is None are dropped first.
    """
    diffs, _ = _usable_diffs(x, y)
    n = len(diffs)
    if n < 2:
        raise InsufficientPairs(f"insufficient pairs: {n} usable, need at least 2")
    mean, sd = _mean_sd(diffs)
    if _all_equal(diffs) or sd == 0:
        if mean == 0:
            return TTestResult(0.0, n - 1, 1.0)
        raise DegenerateSample("degenerate paired sample: differences have zero variance")
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t, n - 1, t_sf_two_tailed(t, n - 1))


def cohens_d(x: Sequence[float | None], y: Sequence[float | None]) -> float:
    """Paired d_z: mean of ``y - x`` over its sample standard deviation."""
    diffs, _ = _usable_diffs(x, y)
    if len(diffs) < 2:
        raise InsufficientPairs(f"insufficient pairs: {len(diffs)} usable, need at least 2")
    mean, sd = _mean_sd(diffs)
    if _all_equal(diffs) or sd == 0:
        if mean == 0:
            return 0.0
        raise DegenerateSample("degenerate paired sample: zero standard deviation")
    return mean / sd


def sign_proportion(x: Sequence[float | None], y: Sequence[float | None]) -> float:
    """Share of pairs whose difference has the sign of the mean difference.

    Ties (zero differences) count one half.  A zero mean gives 0.5.
    """
    diffs, _ = _usable_diffs(x, y)
    n = len(diffs)
    if n < 1:
        raise InsufficientPairs("insufficient pairs: none usable")
    mean = math.fsum(diffs) / n
    if mean == 0:
        return 0.5
    agree = sum(1 for d in diffs if (d > 0) == (mean > 0) and d != 0)
    ties = sum(1 for d in diffs if d == 0)
    return (agree + 0.5 * ties) / n


@dataclass(frozen=True)
class PairedComparison:
    row: str
    col: str
    n: int
    mean_diff: float
    t_stat: float
    df: int
    p_two_tailed: float
    cohens_d: float
    prop_effect: float
    dropped_pairs: int
    significant: bool = False


def compare_pair(x, y, row="x", col="y", threshold=0.05) -> PairedComparison:
    diffs, dropped = _usable_diffs(x, y)
    test = paired_t_test(x, y)
    return PairedComparison(
        row=row, col=col, n=len(diffs), mean_diff=math.fsum(diffs) / len(diffs),
        t_stat=test.t_stat, df=test.df, p_two_tailed=test.p_two_tailed,
        cohens_d=cohens_d(x, y), prop_effect=sign_proportion(x, y),
        dropped_pairs=dropped, significant=test.p_two_tailed < threshold,
    )


@dataclass(frozen=True)
class ComparisonMatrix:
    index_name: str
    labels: tuple[str, ...]
    cells: dict[tuple[str, str], PairedComparison] = field(hash=False)
    alpha: float
    bonferroni_m: int

    @property
    def threshold(self) -> float:
        return self.alpha / self.bonferroni_m

    def cell(self, row: str, col: str) -> PairedComparison:
        return self.cells[(row, col)]


def default_m(k: int) -> int:
    return len(INDEX_NAMES) * math.comb(k, 2)


def align_profiles(profiles_by_translator: Mapping[str, Sequence[DocumentProfile]]
                   ) -> tuple[list[str], dict[str, list[DocumentProfile]]]:
    """Order every set by doc_id; raise listing ids not shared by all sets."""
    by_id = {}
    for label, profiles in profiles_by_translator.items():
        ids = {}
        for p in profiles:
            if p.doc_id in ids:
                raise AlignmentError(f"{label}: duplicate doc_id {p.doc_id!r}")
            ids[p.doc_id] = p
        by_id[label] = ids
    universe = set().union(*(set(ids) for ids in by_id.values())) if by_id else set()
    problems = []
    for label, ids in by_id.items():
        missing = sorted(universe - set(ids))
        if missing:
            problems.append(f"{label} lacks {', '.join(missing)}")
    if problems:
        raise AlignmentError("doc_id misalignment: " + "; ".join(problems))
    order = sorted(universe)
    return order, {label: [ids[d] for d in order] for label, ids in by_id.items()}


def _nan_cell(row, col, n, dropped):
    nan = float("nan")
    return PairedComparison(row, col, n, nan, nan, max(n - 1, 0), nan, nan, nan, dropped, False)


def compare_sets(profiles_by_translator: Mapping[str, Sequence[DocumentProfile]],
                 alpha: float = 0.05, m: int | None = None) -> list[ComparisonMatrix]:
    """One comparison matrix per CollGram index over every pair of translators.

    Translator order follows the mapping's insertion order; for labels
    ``i < j`` the cell ``(labels[i], labels[j])`` holds ``labels[j] - labels[i]``.
    ``m`` defaults to three tests per translator pair.  A cell whose test
    cannot be computed (fewer than two usable pairs, constant nonzero
    difference) is filled with NaN and reported as not significant.
    """
    labels = list(profiles_by_translator)
    if len(labels) < 2:
        raise CollgramError("need at least two translator sets to compare")
    if m is None:
        m = default_m(len(labels))
    threshold = bonferroni_threshold(alpha, m)
    _, aligned = align_profiles(profiles_by_translator)

    matrices = []
    for name in INDEX_NAMES:
        values = {label: [p.index_value(name) for p in aligned[label]] for label in labels}
        cells = {}
        for row, col in combinations(labels, 2):
            x, y = values[row], values[col]
            try:
                cells[(row, col)] = compare_pair(x, y, row, col, threshold)
            except (InsufficientPairs, DegenerateSample) as exc:
                diffs, dropped = _usable_diffs(x, y)
                log.warning("%s %s vs %s: %s", name, row, col, exc)
                cells[(row, col)] = _nan_cell(row, col, len(diffs), dropped)
        matrices.append(ComparisonMatrix(name, tuple(labels), cells, alpha, m))
    return matrices


def group_summary(values: Sequence[float | None]) -> tuple[float, float, int]:
    """Mean, standard error and count of the non-missing values."""
    vals = [v for v in values if v is not None]
    n = len(vals)
    if n == 0:
        return float("nan"), float("nan"), 0
    mean = math.fsum(vals) / n
    if n == 1:
        return mean, float("nan"), 1
    _, sd = _mean_sd(vals)
    return mean, sd / math.sqrt(n), n
