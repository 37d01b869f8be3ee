"""Left-invariant connections, curvature and Ricci tensors in the frame.

Index conventions (all 0-based internally):

* ``gamma[i][j][k]``: nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k
* ``r[i][j][k][l]``:  R(e_i, e_j) e_k = sum_l r[i][j][k][l] e_l
* ``T[i][j]``:        T(e_i, e_j)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

from .lie import (
    EPSILON,
    FAMILIES,
    FRAME,
    FrameVector,
    StructureConstants,
    make_family,
    require_lie,
)
from .scalars import canonical, format_scalar, is_zero, to_field

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)
J_DIAG = (1, 1, -1)
RICCI_WEIGHTS = (-1, -1, 1)

_R3 = range(3)


def _zero():
    return Fraction(0)


@dataclass(frozen=True)
class ConnectionTable:
    gamma: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "gamma",
            tuple(tuple(tuple(canonical(g) for g in row) for row in plane) for plane in self.gamma),
        )

    def nabla(self, x: FrameVector, y: FrameVector) -> FrameVector:
        """nabla_x y for constant-coefficient fields."""
        out = [_zero()] * 3
        for i in _R3:
            if is_zero(x[i]):
                continue
            for j in _R3:
                w = x[i] * y[j]
                if is_zero(w):
                    continue
                g = self.gamma[i][j]
                for k in _R3:
                    out[k] = out[k] + w * g[k]
        return FrameVector(tuple(out))

    def map(self, fn: Callable) -> "ConnectionTable":
        return ConnectionTable(tuple(tuple(tuple(fn(g) for g in row) for row in plane) for plane in self.gamma))

    def to_json(self) -> dict[str, list[str]]:
        return {
            f"G[{i + 1}][{j + 1}]": [format_scalar(g) for g in self.gamma[i][j]]
            for i in _R3
            for j in _R3
        }


@dataclass(frozen=True)
class CurvatureTable:
    r: tuple

    def component(self, i: int, j: int, k: int, l: int):
        return self.r[i][j][k][l]


@dataclass(frozen=True)
class BilinearForm:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(canonical(x) for x in row) for row in self.entries))
        if len(self.entries) != 3 or any(len(row) != 3 for row in self.entries):
            raise ValueError("bilinear forms are 3x3")

    @classmethod
    def zero(cls) -> "BilinearForm":
        return cls(tuple(tuple(_zero() for _ in _R3) for _ in _R3))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __call__(self, x: FrameVector, y: FrameVector):
        total = _zero()
        for i in _R3:
            if is_zero(x[i]):
                continue
            for j in _R3:
                total = total + x[i] * y[j] * self.entries[i][j]
        return canonical(total)

    @property
    def T(self) -> "BilinearForm":
        return BilinearForm(tuple(tuple(self.entries[j][i] for j in _R3) for i in _R3))

    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i] for i in _R3 for j in _R3)

    def is_zero(self) -> bool:
        return all(is_zero(x) for row in self.entries for x in row)

    def map(self, fn: Callable) -> "BilinearForm":
        return BilinearForm(tuple(tuple(fn(x) for x in row) for row in self.entries))

    def __add__(self, other: "BilinearForm") -> "BilinearForm":
        return BilinearForm(tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)))

    def __sub__(self, other: "BilinearForm") -> "BilinearForm":
        return BilinearForm(tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)))

    def scale(self, a) -> "BilinearForm":
        return self.map(lambda x: a * x)

    def to_json(self) -> list[list[str]]:
        return [[format_scalar(x) for x in row] for row in self.entries]


def _J(x: FrameVector) -> FrameVector:
    return FrameVector(tuple(J_DIAG[k] * x[k] for k in _R3))


def levi_civita(c: StructureConstants, *, force: bool = False) -> ConnectionTable:
    """Koszul formula for a left-invariant metric with constant coefficients:

        2 eps_k G^k_ij = eps_k c^k_ij - eps_i c^i_jk + eps_j c^j_ki
    """
    require_lie(c, force=force)
    eps = EPSILON
    gamma = [[[None] * 3 for _ in _R3] for _ in _R3]
    for i in _R3:
        for j in _R3:
            for k in _R3:
                s = eps[k] * c.coefficient(k, i, j) - eps[i] * c.coefficient(i, j, k) + eps[j] * c.coefficient(j, k, i)
                gamma[i][j][k] = HALF * eps[k] * s
    return ConnectionTable(gamma)


def nabla_j(lc: ConnectionTable) -> tuple[tuple[FrameVector, ...], ...]:
    """``result[i][j]`` = (nabla_{e_i} J) e_j = nabla_{e_i}(J e_j) - J(nabla_{e_i} e_j).

    With J diagonal this is (J_jj - J_kk) G^k_ij along e_k.
    """
    return tuple(
        tuple(
            FrameVector(tuple((J_DIAG[j] - J_DIAG[k]) * lc.gamma[i][j][k] for k in _R3))
            for j in _R3
        )
        for i in _R3
    )


def _nabla_j_apply(dj, x: FrameVector, y: FrameVector) -> FrameVector:
    # (nabla_x J) y, bilinear in x and y
    out = FrameVector.zero()
    for i in _R3:
        if is_zero(x[i]):
            continue
        for j in _R3:
            w = x[i] * y[j]
            if is_zero(w):
                continue
            out = out + dj[i][j].scale(w)
    return out


def yano(lc: ConnectionTable) -> ConnectionTable:
    """nabla*_X Y = nabla_X Y - 1/2 (nabla_Y J) JX - 1/4 [(nabla_X J) JY - (nabla_{JX} J) Y]."""
    dj = nabla_j(lc)
    gamma = [[None] * 3 for _ in _R3]
    for i in _R3:
        x = FRAME[i]
        for j in _R3:
            y = FRAME[j]
            v = (
                lc.nabla(x, y)
                - _nabla_j_apply(dj, y, _J(x)).scale(HALF)
                - (_nabla_j_apply(dj, x, _J(y)) - _nabla_j_apply(dj, _J(x), y)).scale(QUARTER)
            )
            gamma[i][j] = tuple(v)
    return ConnectionTable(tuple(tuple(row) for row in gamma))


def curvature(conn: ConnectionTable, c: StructureConstants) -> CurvatureTable:
    """R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z on the frame."""
    g = conn.gamma
    r = [[[[None] * 3 for _ in _R3] for _ in _R3] for _ in _R3]
    for i in _R3:
        for j in _R3:
            cij = c.frame_bracket(i, j)
            for k in _R3:
                for l in _R3:
                    total = _zero()
                    for p in _R3:
                        total = total + g[j][k][p] * g[i][p][l] - g[i][k][p] * g[j][p][l]
                        if not is_zero(cij[p]):
                            total = total - cij[p] * g[p][k][l]
                    r[i][j][k][l] = canonical(total)
    return CurvatureTable(tuple(tuple(tuple(tuple(x) for x in a) for a in b) for b in r))


def ricci(curv: CurvatureTable) -> BilinearForm:
    """Ric(X,Y) = -g(R(X,e1)Y,e1) - g(R(X,e2)Y,e2) + g(R(X,e3)Y,e3)."""
    entries = [[None] * 3 for _ in _R3]
    for i in _R3:
        for j in _R3:
            total = _zero()
            for k in _R3:
                # g(R(e_i,e_k)e_j, e_k) = eps_k R^k_{ikj}
                total = total + RICCI_WEIGHTS[k] * EPSILON[k] * curv.r[i][k][j][k]
            entries[i][j] = total
    return BilinearForm(tuple(tuple(row) for row in entries))


def symmetrize(form: BilinearForm) -> BilinearForm:
    return BilinearForm(
        tuple(tuple(HALF * (form.entries[i][j] + form.entries[j][i]) for j in _R3) for i in _R3)
    )


def symmetrized_ricci_of(c: StructureConstants, *, force: bool = False) -> BilinearForm:
    lc = levi_civita(c, force=force)
    return symmetrize(ricci(curvature(yano(lc), c)))


# symbolic cache ---------------------------------------------------------------


@lru_cache(maxsize=None)
def symbolic_family(family: str) -> StructureConstants:
    return make_family(family, mode="symbolic")


@lru_cache(maxsize=None)
def symbolic_levi_civita(family: str) -> ConnectionTable:
    return levi_civita(symbolic_family(family))


@lru_cache(maxsize=None)
def symbolic_yano(family: str) -> ConnectionTable:
    return yano(symbolic_levi_civita(family))


@lru_cache(maxsize=None)
def symbolic_ricci(family: str) -> BilinearForm:
    """Non-symmetric Yano-Ricci tensor of a family, as polynomials."""
    return ricci(curvature(symbolic_yano(family), symbolic_family(family)))


@lru_cache(maxsize=None)
def symbolic_symmetrized_ricci(family: str) -> BilinearForm:
    return symmetrize(symbolic_ricci(family))


def evaluate_form(form: BilinearForm, params: Mapping[str, object]) -> BilinearForm:
    return form.map(lambda x: to_field(x, params))


def evaluate_connection(conn: ConnectionTable, params: Mapping[str, object]) -> ConnectionTable:
    return conn.map(lambda x: to_field(x, params))


def warm_cache() -> None:
    for fam in FAMILIES:
        symbolic_symmetrized_ricci(fam)
