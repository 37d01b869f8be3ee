"""Lie derivatives of constant (0,2)-tensors and the collineation system.

For a left-invariant field xi and a tensor with constant frame components,
(L_xi T)(X, Y) = -T([xi, X], Y) - T(X, [xi, Y]), which is linear in xi. The
condition L_xi T = 0 is therefore the 6x3 homogeneous system assembled by
:func:`collineation_matrix`, solved exactly by :func:`nullspace`.
"""

from __future__ import annotations

import random
from itertools import combinations
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import BilinearForm
from .lie import FRAME, FrameVector, StructureConstants, bracket
from .scalars import Poly, format_scalar, is_zero

ROWS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
ROW_LABELS = tuple(f"({i + 1},{j + 1})" for i, j in ROWS)


class SymbolicSystemError(TypeError):
    """The collineation system needs substituted (non-symbolic) entries."""


def lie_derivative(T: BilinearForm, xi: FrameVector, c: StructureConstants) -> BilinearForm:
    ad = [tuple(bracket(xi, e, c)) for e in FRAME]
    t = T.entries
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            # -T([xi, e_i], e_j) - T(e_i, [xi, e_j])
            total = Fraction(0)
            for p in range(3):
                if not is_zero(ad[i][p]):
                    total = total - ad[i][p] * t[p][j]
                if not is_zero(ad[j][p]):
                    total = total - ad[j][p] * t[i][p]
            row.append(total)
        rows.append(tuple(row))
    return BilinearForm(tuple(rows))


@dataclass(frozen=True)
class LinearSystem:
    """Rows (i,j), i <= j, in ``ROWS`` order; columns lambda_1..lambda_3."""

    matrix: tuple

    def rows_json(self) -> dict[str, list[str]]:
        return {label: [format_scalar(x) for x in row] for label, row in zip(ROW_LABELS, self.matrix)}

    def to_json(self) -> dict:
        return {"rows": self.rows_json()}

    def is_zero(self) -> bool:
        return all(is_zero(x) for row in self.matrix for x in row)

    def apply(self, lam: Sequence) -> tuple:
        return tuple(sum((row[k] * lam[k] for k in range(3)), Fraction(0)) for row in self.matrix)


def collineation_matrix(T: BilinearForm, c: StructureConstants) -> LinearSystem:
    for x in (*[x for row in T.entries for x in row], *[x for b in c.brackets for x in b]):
        if isinstance(x, Poly):
            raise SymbolicSystemError(
                "collineation system needs numeric entries; substitute the parameters first"
            )
    derivs = [lie_derivative(T, e, c) for e in FRAME]
    return LinearSystem(tuple(tuple(derivs[k][i, j] for k in range(3)) for i, j in ROWS))


def rref(rows: Sequence[Sequence], ncols: int = 3) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over any exact field, with pivot columns.

    Pivot choice: scan columns left to right, take the first row (top down)
    with a nonzero entry in that column.
    """
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pick = next((i for i in range(r, len(m)) if not is_zero(m[i][col])), None)
        if pick is None:
            continue
        m[r], m[pick] = m[pick], m[r]
        inv = Fraction(1) / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not is_zero(m[i][col]):
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int = 3) -> int:
    return len(rref(rows, ncols)[1])


@dataclass(frozen=True)
class CollineationBasis:
    vectors: tuple[FrameVector, ...]
    rank: int = 0

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "basis": [v.to_json() for v in self.vectors]}


def nullspace(M: LinearSystem) -> CollineationBasis:
    reduced, pivots = rref(M.matrix)
    free = [c for c in range(3) if c not in pivots]
    vectors = []
    for f in free:
        coords: list = [Fraction(0)] * 3
        coords[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            coords[p] = -row[f]
        vectors.append(FrameVector(tuple(coords)))
    return CollineationBasis(tuple(vectors), len(pivots))


def echelon_span(vectors: Sequence[FrameVector]) -> tuple:
    reduced, _ = rref([tuple(v) for v in vectors])
    return tuple(tuple(row) for row in reduced)


def span_equal(a: Sequence[FrameVector], b: Sequence[FrameVector]) -> bool:
    return echelon_span(a) == echelon_span(b)


def in_span(x: FrameVector, vectors: Sequence[FrameVector]) -> bool:
    base = rank([tuple(v) for v in vectors])
    return rank([tuple(v) for v in vectors] + [tuple(x)]) == base


def rank_by_minors(rows: Sequence[Sequence]) -> int:
    """Rank of a 6x3 (or smaller) matrix from its nonvanishing minors.

    Deliberately elimination-free so it can audit :func:`nullspace`.
    """
    def det(sub):
        if len(sub) == 1:
            return sub[0][0]
        if len(sub) == 2:
            return sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]
        return (
            sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
            - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
            + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
        )

    ncols = len(rows[0]) if rows else 0
    for k in range(min(len(rows), ncols), 0, -1):
        for rsel in combinations(range(len(rows)), k):
            for csel in combinations(range(ncols), k):
                if not is_zero(det([[rows[r][c] for c in csel] for r in rsel])):
                    return k
    return 0


def random_rational(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


@dataclass
class OracleReport:
    soundness_checked: int = 0
    maximality_checked: int = 0
    rank_consistent: bool = True
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and self.rank_consistent

    def to_json(self) -> dict:
        return {
            "soundness_checked": self.soundness_checked,
            "maximality_checked": self.maximality_checked,
            "rank_consistent": self.rank_consistent,
            "violations": list(self.violations),
        }


def oracle_check(
    basis: CollineationBasis,
    T: BilinearForm,
    c: StructureConstants,
    trials: int = 20,
    rng: random.Random | None = None,
    M: LinearSystem | None = None,
) -> OracleReport:
    """Audit a computed basis independently of the elimination that produced it.

    Soundness: every basis vector and ``trials`` random combinations have
    vanishing Lie derivative. Maximality: rank(M) + dimension = 3, and
    ``trials`` random vectors outside the span have nonzero Lie derivative.
    """
    rng = rng or random.Random(0)
    rep = OracleReport()
    # L_xi T is linear in xi: random vectors reuse the three frame derivatives
    frame_derivs = [lie_derivative(T, e, c).entries for e in FRAME]

    def derivative_vanishes(xi: FrameVector) -> bool:
        return all(
            is_zero(sum((xi[k] * frame_derivs[k][i][j] for k in range(3)), Fraction(0)))
            for i, j in ROWS
        )

    for k, vec in enumerate(basis.vectors):
        rep.soundness_checked += 1
        if not lie_derivative(T, vec, c).is_zero():
            rep.violations.append(f"basis vector {k} {vec} is not a collineation")
    if basis.vectors:
        for _ in range(trials):
            comb = FrameVector.zero()
            for vec in basis.vectors:
                comb = comb + vec.scale(random_rational(rng))
            rep.soundness_checked += 1
            if not derivative_vanishes(comb):
                rep.violations.append(f"combination {comb} of basis vectors is not a collineation")
    if M is None:
        M = collineation_matrix(T, c)
    r = rank_by_minors(M.matrix)
    if r + basis.dimension != 3:
        rep.rank_consistent = False
        rep.violations.append(f"rank {r} + dimension {basis.dimension} != 3")
    if basis.dimension < 3:
        drawn = 0
        attempts = 0
        while drawn < trials and attempts < 50 * trials:
            attempts += 1
            xi = FrameVector(tuple(random_rational(rng) for _ in range(3)))
            if in_span(xi, basis.vectors):
                continue
            drawn += 1
            rep.maximality_checked += 1
            if derivative_vanishes(xi):
                rep.violations.append(f"{xi} lies outside the span but is a collineation")
    return rep
