"""Symbolic probability expressions: the output language of identification.

An estimand is a tree of observational conditionals, sums, products and
quotients. It serializes canonically as an s-expression (``parse`` inverts
``to_sexpr`` exactly) and prints one-way to a sum-notation text form. It
evaluates against any joint distribution exposing marginals over variable
subsets; sums are evaluated by variable elimination, never by materializing
the full joint.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np

from .tables import Factor, contract


class EstimandError(ValueError):
    pass


class ZeroConditioningError(EstimandError):
    """Raised when evaluation needs a conditional on a zero-probability event."""

    def __init__(self, given: tuple[str, ...]):
        self.given = given
        super().__init__(
            f"conditioning on zero-probability event over {', '.join(given)}")


class Estimand:
    def free_variables(self) -> frozenset[str]:
        raise NotImplementedError

    def to_sexpr(self) -> str:
        raise NotImplementedError

    def to_text(self) -> str:
        """Sum-notation rendering, e.g. ``\\sum_{z} P(y|x,z) P(z)``."""
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_sexpr()


@dataclass(frozen=True)
class One(Estimand):
    def free_variables(self):
        return frozenset()

    def to_sexpr(self):
        return "1"

    def to_text(self):
        return "1"


@dataclass(frozen=True)
class Prob(Estimand):
    vars: tuple[str, ...]
    given: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.vars:
            raise EstimandError("Prob needs at least one variable")
        if set(self.vars) & set(self.given):
            raise EstimandError(
                f"variables {set(self.vars) & set(self.given)} on both sides of |")

    def free_variables(self):
        return frozenset(self.vars) | frozenset(self.given)

    def to_sexpr(self):
        return f"(p ({' '.join(self.vars)}) ({' '.join(self.given)}))"

    def to_text(self):
        if self.given:
            return f"P({','.join(self.vars)}|{','.join(self.given)})"
        return f"P({','.join(self.vars)})"


@dataclass(frozen=True)
class Sum(Estimand):
    bound: tuple[str, ...]
    child: Estimand

    def __post_init__(self):
        if len(set(self.bound)) != len(self.bound):
            raise EstimandError(f"duplicate bound variables {self.bound}")

    def free_variables(self):
        return self.child.free_variables() - frozenset(self.bound)

    def to_sexpr(self):
        return f"(sum ({' '.join(self.bound)}) {self.child.to_sexpr()})"

    def to_text(self):
        return f"\\sum_{{{','.join(self.bound)}}} {self.child.to_text()}"


@dataclass(frozen=True)
class Product(Estimand):
    children: tuple[Estimand, ...]

    def free_variables(self):
        out: frozenset[str] = frozenset()
        for c in self.children:
            out |= c.free_variables()
        return out

    def to_sexpr(self):
        return f"(prod {' '.join(c.to_sexpr() for c in self.children)})"

    def to_text(self):
        parts = []
        for c in self.children:
            t = c.to_text()
            if isinstance(c, (Sum, Quotient)):
                t = f"[{t}]"
            parts.append(t)
        return " ".join(parts)


@dataclass(frozen=True)
class Quotient(Estimand):
    num: Estimand
    den: Estimand

    def free_variables(self):
        return self.num.free_variables() | self.den.free_variables()

    def to_sexpr(self):
        return f"(div {self.num.to_sexpr()} {self.den.to_sexpr()})"

    def to_text(self):
        return f"[{self.num.to_text()}] / [{self.den.to_text()}]"


# -- parsing -----------------------------------------------------------------

def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise EstimandError("unexpected end of expression")
    tok = tokens[pos]
    if tok == "(":
        out = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise EstimandError("unbalanced parentheses")
            if tokens[pos] == ")":
                break
            node, pos = _read(tokens, pos)
            out.append(node)
        return out, pos + 1
    if tok == ")":
        raise EstimandError("unbalanced parentheses")
    return tok, pos + 1


def _build(node) -> Estimand:
    if node == "1":
        return One()
    if not isinstance(node, list) or not node:
        raise EstimandError(f"cannot parse {node!r}")
    head = node[0]
    if head == "p":
        vars_, given = node[1], node[2]
        return Prob(tuple(vars_), tuple(given))
    if head == "sum":
        return Sum(tuple(node[1]), _build(node[2]))
    if head == "prod":
        return Product(tuple(_build(c) for c in node[1:]))
    if head == "div":
        return Quotient(_build(node[1]), _build(node[2]))
    raise EstimandError(f"unknown operator {head!r}")


def parse(text: str) -> Estimand:
    tokens = _tokenize(text)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise EstimandError(f"trailing tokens after expression: {tokens[pos:]}")
    return _build(node)


# -- simplification ----------------------------------------------------------

def simplify(e: Estimand) -> Estimand:
    """Conservative rewrites only: drop empty sums/products, merge nested
    sums, absorb marginalizing sums into atoms, Quotient(e, 1) -> e."""
    if isinstance(e, Prob) or isinstance(e, One):
        return e
    if isinstance(e, Sum):
        child = simplify(e.child)
        bound = e.bound
        if not bound:
            return child
        if isinstance(child, Sum):
            return simplify(Sum(tuple(dict.fromkeys(bound + child.bound)), child.child))
        if isinstance(child, Prob) and not child.given and set(bound) < set(child.vars):
            return Prob(tuple(v for v in child.vars if v not in bound))
        return Sum(bound, child)
    if isinstance(e, Product):
        flat: list[Estimand] = []
        for c in e.children:
            c = simplify(c)
            if isinstance(c, One):
                continue
            if isinstance(c, Product):
                flat.extend(c.children)
            else:
                flat.append(c)
        if not flat:
            return One()
        if len(flat) == 1:
            return flat[0]
        return Product(tuple(flat))
    if isinstance(e, Quotient):
        num, den = simplify(e.num), simplify(e.den)
        if isinstance(den, One):
            return num
        return Quotient(num, den)
    raise EstimandError(f"unknown node {type(e)}")


# -- evaluation --------------------------------------------------------------

class JointDistribution(Protocol):
    """Any distribution that can produce marginal tables over subsets."""

    def variable_names(self) -> tuple[str, ...]: ...

    def marginal(self, names: tuple[str, ...]) -> Factor: ...


def _eval_factors(e: Estimand, joint: JointDistribution,
                  on_zero_given: str) -> list[Factor]:
    """Evaluate to an implicit product of factors over e's free variables."""
    if isinstance(e, One):
        return []
    if isinstance(e, Prob):
        m = joint.marginal(tuple(e.vars) + tuple(e.given))
        if not e.given:
            return [m.normalize()]
        den = m.marginalize_out(e.vars)
        dt = den.table
        zero = dt <= 0
        if np.any(zero):
            if on_zero_given == "error":
                raise ZeroConditioningError(tuple(e.given))
            # "zero" policy: undefined conditionals contribute nothing; any
            # bias is bounded by the probability mass of the skipped events.
            dt = np.where(zero, 1.0, dt)
        cond = m.table / dt.reshape(
            tuple(1 for _ in e.vars) + den.table.shape)
        if np.any(zero) and on_zero_given == "zero":
            cond = cond * (~zero).reshape(
                tuple(1 for _ in e.vars) + den.table.shape)
        return [Factor(m.vars, cond)]
    if isinstance(e, Product):
        out: list[Factor] = []
        for c in e.children:
            out.extend(_eval_factors(c, joint, on_zero_given))
        return out
    if isinstance(e, Sum):
        inner = _eval_factors(e.child, joint, on_zero_given)
        keep = tuple(sorted(e.free_variables()))
        covered: set[str] = set()
        for f in inner:
            covered |= set(f.vars)
        # Bound variables absent from the inner factors still contribute a
        # cardinality multiplier (sum of a constant over their domain).
        mult = 1.0
        for v in e.bound:
            if v not in covered:
                mult *= joint.marginal((v,)).table.size
        out = contract(inner, keep) if inner else Factor((), np.array(1.0))
        if mult != 1.0:
            out = Factor(out.vars, out.table * mult)
        return [out]
    if isinstance(e, Quotient):
        num = _collapse(_eval_factors(e.num, joint, on_zero_given),
                        e.num.free_variables())
        den = _collapse(_eval_factors(e.den, joint, on_zero_given),
                        e.den.free_variables())
        if not set(den.vars) <= set(num.vars):
            raise EstimandError(
                f"quotient denominator variables {den.vars} not within "
                f"numerator variables {num.vars}")
        dt = den.transpose_to(tuple(v for v in num.vars if v in set(den.vars)))
        shape = tuple(
            num.table.shape[i] if num.vars[i] in set(den.vars) else 1
            for i in range(len(num.vars)))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num.table / dt.table.reshape(shape)
        out = np.where(np.isfinite(out), out, 0.0)
        return [Factor(num.vars, out)]
    raise EstimandError(f"unknown node {type(e)}")


def _collapse(factors: list[Factor], free: Iterable[str]) -> Factor:
    keep = tuple(sorted(free))
    if not factors:
        return Factor((), np.array(1.0))
    return contract(factors, keep)


def evaluate_estimand(e: Estimand, joint: JointDistribution,
                      on_zero_given: str = "error") -> Factor:
    """Evaluate to a table over the estimand's free variables.

    ``on_zero_given``: "error" raises on conditionals against zero-mass
    events; "zero" scores them as 0 (for Monte-Carlo joints, where empty
    cells with negligible weight would otherwise poison the whole sum).
    """
    if on_zero_given not in ("error", "zero"):
        raise EstimandError(f"unknown zero policy {on_zero_given!r}")
    free = e.free_variables()
    return _collapse(_eval_factors(e, joint, on_zero_given), free)


def evaluate_scalar(e: Estimand, joint: JointDistribution,
                    assignment: dict[str, int],
                    on_zero_given: str = "error") -> float:
    f = evaluate_estimand(e, joint, on_zero_given)
    return f.value({v: assignment[v] for v in f.vars})
