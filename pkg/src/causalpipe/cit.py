"""Conditional independence tests: Fisher-z partial correlation for
continuous columns, the G^2 likelihood-ratio test for categorical ones.
Mixed-type conditioning is rejected rather than silently discretized."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from .dataset import Dataset


class CiError(ValueError):
    pass


@dataclass(frozen=True)
class CiResult:
    statistic: float
    p_value: float
    independent: bool
    test_kind: str  # fisher_z | g2


def _kinds(d: Dataset, names: Iterable[str]) -> set[str]:
    return {d.variable(n).kind for n in names}


def ci_test(d: Dataset, i: str, j: str, s: Iterable[str] = (),
            alpha: float = 0.01) -> CiResult:
    """Test i independent of j given s at level alpha.

    independent <=> p_value > alpha. Zero-variance columns carry no
    association evidence and test as independent with p = 1.
    """
    s = tuple(s)
    if i == j:
        raise CiError("i and j must differ")
    if i in s or j in s:
        raise CiError("conditioning set must exclude i and j")
    kinds = _kinds(d, (i, j) + s)
    if kinds <= {"continuous"}:
        return _fisher_z(d, i, j, s, alpha)
    if "continuous" not in kinds:
        return _g2(d, i, j, s, alpha)
    raise CiError(
        "mixed continuous/categorical test rejected; discretize explicitly first")


def _fisher_z(d: Dataset, i: str, j: str, s: tuple[str, ...],
              alpha: float) -> CiResult:
    n = d.n
    if n <= len(s) + 3:
        raise CiError(f"need n > |s| + 3 for fisher_z (n={n}, |s|={len(s)})")
    cols = d.columns((i, j) + s)
    sds = cols.std(axis=0)
    if sds[0] == 0 or sds[1] == 0:
        return CiResult(0.0, 1.0, True, "fisher_z")
    keep = [0, 1] + [k for k in range(2, cols.shape[1]) if sds[k] > 0]
    corr = np.corrcoef(cols[:, keep].T)
    prec = np.linalg.pinv(corr)
    r = -prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1])
    r = min(1.0, max(-1.0, r))
    if abs(r) >= 1.0 - 1e-15:
        return CiResult(float("inf"), 0.0, False, "fisher_z")
    z = 0.5 * math.log((1 + r) / (1 - r))
    statistic = math.sqrt(n - len(s) - 3) * z
    p = 2 * stats.norm.sf(abs(statistic))
    return CiResult(float(statistic), float(p), p > alpha, "fisher_z")


def _g2(d: Dataset, i: str, j: str, s: tuple[str, ...], alpha: float) -> CiResult:
    def card(name: str) -> int:
        c = d.variable(name).cardinality
        if c is None:
            raise CiError(f"{name!r} has no discrete cardinality")
        return c

    ci, cj = card(i), card(j)
    codes = d.int_codes((i, j) + s)
    if s:
        scards = [card(v) for v in s]
        strata = np.ravel_multi_index(
            tuple(codes[:, 2 + k] for k in range(len(s))), tuple(scards))
        n_strata = int(np.prod(scards))
    else:
        strata = np.zeros(d.n, dtype=np.int64)
        n_strata = 1

    g2 = 0.0
    occupied = 0
    for st in range(n_strata):
        mask = strata == st
        m = int(mask.sum())
        if m == 0:
            continue
        occupied += 1
        table = np.zeros((ci, cj))
        np.add.at(table, (codes[mask, 0], codes[mask, 1]), 1.0)
        rows = table.sum(axis=1, keepdims=True)
        colsums = table.sum(axis=0, keepdims=True)
        expected = rows * colsums / m
        nz = table > 0
        g2 += 2.0 * float(np.sum(table[nz] * np.log(table[nz] / expected[nz])))
    dof = max(occupied, 1) * (ci - 1) * (cj - 1)
    p = float(stats.chi2.sf(g2, dof)) if dof > 0 else 1.0
    return CiResult(float(g2), p, p > alpha, "g2")
