"""Dense factors over named discrete variables, with greedy variable
elimination. Shared by the SCM oracle and the estimand evaluator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class Factor:
    vars: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        if len(self.vars) != self.table.ndim:
            raise TableError(
                f"factor over {self.vars} has table of rank {self.table.ndim}")

    @property
    def cards(self) -> dict[str, int]:
        return {v: s for v, s in zip(self.vars, self.table.shape)}

    def normalize(self) -> "Factor":
        total = float(self.table.sum())
        if total <= 0:
            raise TableError("factor has no mass to normalize")
        return Factor(self.vars, self.table / total)

    def marginalize_out(self, names: Iterable[str]) -> "Factor":
        out = set(names)
        keep = tuple(v for v in self.vars if v not in out)
        axes = tuple(i for i, v in enumerate(self.vars) if v in out)
        return Factor(keep, self.table.sum(axis=axes)) if axes else self

    def slice_at(self, assignment: dict[str, int]) -> "Factor":
        idx = tuple(
            assignment[v] if v in assignment else slice(None) for v in self.vars
        )
        keep = tuple(v for v in self.vars if v not in assignment)
        return Factor(keep, self.table[idx])

    def transpose_to(self, order: Sequence[str]) -> "Factor":
        order = tuple(order)
        if set(order) != set(self.vars):
            raise TableError(f"cannot reorder {self.vars} to {order}")
        perm = [self.vars.index(v) for v in order]
        return Factor(order, np.transpose(self.table, perm))

    def value(self, assignment: dict[str, int]) -> float:
        idx = tuple(assignment[v] for v in self.vars)
        return float(self.table[idx])


def _product(factors: list[Factor], out_vars: tuple[str, ...]) -> np.ndarray:
    """einsum product of factors, summing out everything not in out_vars."""
    involved: list[str] = []
    for f in factors:
        for v in f.vars:
            if v not in involved:
                involved.append(v)
    axis = {v: i for i, v in enumerate(involved)}
    args: list = []
    for f in factors:
        args.append(f.table)
        args.append([axis[v] for v in f.vars])
    args.append([axis[v] for v in out_vars])
    return np.einsum(*args)


def contract(factors: Sequence[Factor], keep: Iterable[str]) -> Factor:
    """Eliminate all variables outside ``keep`` by greedy min-size ordering.

    Returns a single factor over ``keep`` (variables sorted by first
    appearance across the factor list, then by the requested order).
    """
    keep_set = set(keep)
    pool = list(factors)
    all_vars: list[str] = []
    for f in pool:
        for v in f.vars:
            if v not in all_vars:
                all_vars.append(v)
    missing = keep_set - set(all_vars)
    if missing:
        raise TableError(f"keep variables {sorted(missing)} not present in factors")
    to_elim = [v for v in all_vars if v not in keep_set]

    while to_elim:
        best_v, best_size = None, None
        for v in to_elim:
            vs: set[str] = set()
            for f in pool:
                if v in f.vars:
                    vs |= set(f.vars)
            size = 1
            for u in vs:
                for f in pool:
                    if u in f.vars:
                        size *= f.cards[u]
                        break
            if best_size is None or size < best_size:
                best_v, best_size = v, size
        v = best_v
        to_elim.remove(v)
        involved = [f for f in pool if v in f.vars]
        rest = [f for f in pool if v not in f.vars]
        out_vars_l: list[str] = []
        for f in involved:
            for u in f.vars:
                if u != v and u not in out_vars_l:
                    out_vars_l.append(u)
        out_vars = tuple(out_vars_l)
        pool = rest + [Factor(out_vars, _product(involved, out_vars))]

    out_order = tuple(v for v in all_vars if v in keep_set)
    return Factor(out_order, _product(pool, out_order))
