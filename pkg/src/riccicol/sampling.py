"""Exact parameter sampling under polynomial equalities and inequations.

Free parameters are drawn as p/q with p in [-9, 9], q in [1, 9]. Each
equality is then solved for one of its designated variables with the other
parameters fixed: rational roots come from the rational root theorem, and,
when the case allows it, quadratics without rational roots are solved in
Q(sqrt(d)). Samples violating any constraint are rejected and redrawn.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .collineation import random_rational
from .lie import FAMILY_DEFS
from .scalars import VARIABLES, Poly, QuadraticSurd, format_scalar, parse_poly, sqrt_rational


class UnsatisfiableConstraints(RuntimeError):
    pass


@dataclass(frozen=True)
class Constraint:
    text: str
    expr: Poly
    rel: str  # "=" or "!="
    solve: tuple[str, ...] = ()
    choose: str = "first"  # or "any": try the solve variables in random order

    @classmethod
    def equal(cls, text: str, solve: Sequence[str] = (), choose: str = "first") -> "Constraint":
        expr = parse_poly(text)
        order = tuple(solve) or tuple(v for v in VARIABLES if v in expr.variables())
        return cls(f"{text} = 0", expr, "=", order, choose)

    @classmethod
    def nonzero(cls, text: str) -> "Constraint":
        return cls(f"{text} != 0", parse_poly(text), "!=")

    @classmethod
    def from_json(cls, obj: Mapping) -> "Constraint":
        rel = obj.get("rel", "=")
        if rel in ("=", "=="):
            return cls.equal(obj["expr"], obj.get("solve", ()), obj.get("choose", "first"))
        if rel == "!=":
            return cls.nonzero(obj["expr"])
        raise ValueError(f"unknown relation {rel!r}")

    def holds(self, params: Mapping[str, object]) -> bool:
        value = self.expr.eval(params)
        return (value == 0) if self.rel == "=" else (value != 0)


def family_constraints(family: str, *, relax_equalities: bool = False) -> list[Constraint]:
    fdef = FAMILY_DEFS[family]
    out = [Constraint.nonzero(text) for text in fdef.inequalities]
    if not relax_equalities:
        out += [Constraint.equal(text, solve) for text, solve in fdef.equalities]
    return out


def _univariate(expr: Poly, var: str, params: Mapping[str, object]) -> list:
    """Coefficients in ``var`` (lowest first) with every other variable fixed."""
    i = VARIABLES.index(var)
    coeffs: list = [Fraction(0)] * (expr.degree_in(var) + 1)
    for exp, c in expr.terms:
        term = c
        for j, (name, e) in enumerate(zip(VARIABLES, exp)):
            if j != i and e:
                term = term * params[name] ** e
        coeffs[exp[i]] = term + coeffs[exp[i]]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _divisors(k: int) -> list[int]:
    k = abs(k)
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d * d != k:
                large.append(k // d)
        d += 1
    return small + large[::-1]


def _horner(coeffs: Sequence, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Distinct rational roots of a nonzero polynomial (coefficients lowest first)."""
    coeffs = [Fraction(c) for c in coeffs]
    roots: list[Fraction] = []
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if len(coeffs) <= 1:
        return roots
    scale = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * scale) for c in coeffs]
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and _horner(coeffs, cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def solve_univariate(coeffs: Sequence, *, allow_extension: bool = False) -> list | None:
    """Roots of a univariate polynomial; ``None`` means every value works."""
    if all(c == 0 for c in coeffs):
        return None
    if len(coeffs) == 1:
        return []
    if any(isinstance(c, QuadraticSurd) and c.b != 0 for c in coeffs):
        if len(coeffs) == 2:
            return [-coeffs[0] / coeffs[1]]
        return []
    coeffs = [Fraction(c.a) if isinstance(c, QuadraticSurd) else Fraction(c) for c in coeffs]
    roots = rational_roots(coeffs)
    if roots or not allow_extension:
        return roots
    trimmed = list(coeffs)
    while trimmed and trimmed[0] == 0:
        trimmed = trimmed[1:]
    if len(trimmed) != 3:
        return []
    c0, c1, c2 = trimmed
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return []
    root = sqrt_rational(disc)
    return [(-c1 - root) / (2 * c2), (-c1 + root) / (2 * c2)]


def sample_parameters(
    family: str,
    constraints: Sequence[Constraint],
    rng: random.Random,
    *,
    allow_extension: bool = False,
    budget: int = 2000,
) -> dict[str, object]:
    """One exact parameter sample satisfying every constraint.

    ``constraints`` should already include the family constraints that apply.
    Equalities are solved in the given order; an equality whose solve
    variables are all pinned already is only checked at the end.
    """
    names = FAMILY_DEFS[family].params
    equalities = [c for c in constraints if c.rel == "="]
    for _ in range(budget):
        params: dict[str, object] = {name: random_rational(rng) for name in names}
        fixed: set[str] = set()
        feasible = True
        for eq in equalities:
            # a variable pinned by an earlier equality is never re-solved
            order = [v for v in eq.solve if v in params and v not in fixed]
            if not order:
                continue
            if eq.choose == "any":
                rng.shuffle(order)
            solved = False
            for var in order:
                roots = solve_univariate(_univariate(eq.expr, var, params), allow_extension=allow_extension)
                if roots is None:
                    solved = True
                    break
                if roots:
                    params[var] = rng.choice(roots)
                    fixed.add(var)
                    solved = True
                    break
            if not solved:
                feasible = False
                break
        if feasible and all(c.holds(params) for c in constraints):
            return params
    texts = "; ".join(c.text for c in constraints)
    raise UnsatisfiableConstraints(f"no sample of {family} satisfying [{texts}] within {budget} draws")


def format_params(params: Mapping[str, object]) -> dict[str, str]:
    return {k: format_scalar(params[k]) for k in VARIABLES if k in params}
