"""Three-dimensional Lie algebras in a pseudo-orthonormal frame.

The frame (e1, e2, e3) has signature (+1, +1, -1). Brackets are stored as
the three vectors [e1,e2], [e1,e3], [e2,e3]; antisymmetry is structural.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping

from .scalars import (
    Poly,
    canonical,
    format_scalar,
    is_zero,
    parse_scalar,
)

log = logging.getLogger(__name__)

EPSILON = (1, 1, -1)
FAMILIES = ("G1", "G2", "G3", "G4", "G5", "G6", "G7")
UNIMODULAR = ("G1", "G2", "G3", "G4")

# storage order of the independent brackets
PAIRS = ((0, 1), (0, 2), (1, 2))
PAIR_KEYS = ("c12", "c13", "c23")


class ConstraintViolation(ValueError):
    """Numeric family parameters violate the family's defining constraints."""


class JacobiError(ValueError):
    """A bracket table fails the Jacobi identity."""


@dataclass(frozen=True)
class FrameVector:
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != 3:
            raise ValueError("frame vectors have exactly three coordinates")
        object.__setattr__(self, "coords", tuple(canonical(c) for c in self.coords))

    @classmethod
    def of(cls, x1, x2, x3) -> "FrameVector":
        return cls((x1, x2, x3))

    @classmethod
    def zero(cls) -> "FrameVector":
        return cls((Fraction(0),) * 3)

    @classmethod
    def basis(cls, k: int) -> "FrameVector":
        return cls(tuple(Fraction(int(i == k)) for i in range(3)))

    def __iter__(self) -> Iterator:
        return iter(self.coords)

    def __getitem__(self, k):
        return self.coords[k]

    def __add__(self, other: "FrameVector") -> "FrameVector":
        return FrameVector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "FrameVector") -> "FrameVector":
        return FrameVector(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "FrameVector":
        return FrameVector(tuple(-a for a in self))

    def scale(self, a) -> "FrameVector":
        return FrameVector(tuple(a * x for x in self))

    def is_zero(self) -> bool:
        return all(is_zero(x) for x in self)

    def map(self, fn: Callable) -> "FrameVector":
        return FrameVector(tuple(fn(x) for x in self))

    def to_json(self) -> list[str]:
        return [format_scalar(x) for x in self]

    def __str__(self):
        return "(" + ", ".join(self.to_json()) + ")"


E1, E2, E3 = (FrameVector.basis(k) for k in range(3))
FRAME = (E1, E2, E3)


def metric(x: FrameVector, y: FrameVector):
    return canonical(sum((EPSILON[k] * x[k] * y[k] for k in range(3)), Fraction(0)))


@dataclass(frozen=True)
class StructureConstants:
    """Bracket table: ``brackets[p]`` is the bracket of the pair ``PAIRS[p]``."""

    brackets: tuple[FrameVector, FrameVector, FrameVector]
    label: str = "custom"

    def __post_init__(self):
        vecs = tuple(b if isinstance(b, FrameVector) else FrameVector(tuple(b)) for b in self.brackets)
        if len(vecs) != 3:
            raise ValueError("need the three brackets [e1,e2], [e1,e3], [e2,e3]")
        object.__setattr__(self, "brackets", vecs)

    def frame_bracket(self, i: int, j: int) -> FrameVector:
        if i == j:
            return FrameVector.zero()
        if i < j:
            return self.brackets[PAIRS.index((i, j))]
        return -self.brackets[PAIRS.index((j, i))]

    def coefficient(self, k: int, i: int, j: int):
        """c^k_{ij}, 0-based."""
        return self.frame_bracket(i, j)[k]

    def map(self, fn: Callable) -> "StructureConstants":
        return StructureConstants(tuple(b.map(fn) for b in self.brackets), self.label)

    def is_symbolic(self) -> bool:
        return any(isinstance(x, Poly) for b in self.brackets for x in b)

    def to_json(self) -> dict[str, list[str]]:
        return {key: b.to_json() for key, b in zip(PAIR_KEYS, self.brackets)}

    @classmethod
    def from_json(cls, obj: Mapping[str, list[str]], label: str = "custom") -> "StructureConstants":
        missing = [k for k in PAIR_KEYS if k not in obj]
        if missing:
            raise ValueError(f"structure-constant table lacks {missing}")
        vecs = []
        for key in PAIR_KEYS:
            entries = obj[key]
            if len(entries) != 3:
                raise ValueError(f"{key} must have three entries")
            vecs.append(FrameVector(tuple(parse_scalar(str(e)) for e in entries)))
        return cls(tuple(vecs), label)


def bracket(x: FrameVector, y: FrameVector, c: StructureConstants) -> FrameVector:
    """Bilinear extension of the frame brackets."""
    out = [Fraction(0)] * 3
    for p, (i, j) in enumerate(PAIRS):
        w = x[i] * y[j] - x[j] * y[i]
        if is_zero(w):
            continue
        b = c.brackets[p]
        for k in range(3):
            out[k] = out[k] + w * b[k]
    return FrameVector(tuple(out))


def jacobi_residual(c: StructureConstants) -> FrameVector:
    """[e1,[e2,e3]] + [e2,[e3,e1]] + [e3,[e1,e2]]; zero iff c is a Lie algebra.

    In dimension three the Jacobiator is totally antisymmetric, so the single
    triple (1, 2, 3) decides it.
    """
    return (
        bracket(E1, bracket(E2, E3, c), c)
        + bracket(E2, bracket(E3, E1, c), c)
        + bracket(E3, bracket(E1, E2, c), c)
    )


def is_lie_algebra(c: StructureConstants) -> bool:
    return jacobi_residual(c).is_zero()


def require_lie(c: StructureConstants, *, force: bool = False) -> None:
    residual = jacobi_residual(c)
    if residual.is_zero():
        return
    if force:
        log.warning("Jacobi identity fails for %s (residual %s); continuing", c.label, residual)
        return
    raise JacobiError(f"Jacobi identity fails for {c.label}: residual {residual}")


# families --------------------------------------------------------------------

_Table = Callable[..., tuple]


def _g1(m, n, u, v):
    return ((m, 0, -n), (-m, -n, 0), (n, m, m))


def _g2(m, n, u, v):
    return ((0, n, -u), (0, -u, -n), (m, 0, 0))


def _g2_as_printed(m, n, u, v):
    # "ma" read as n; [e2,e3] = m e2 exactly as printed
    return ((0, n, -u), (0, -u, -n), (0, m, 0))


def _g3(m, n, u, v):
    return ((0, 0, -u), (0, -n, 0), (m, 0, 0))


def _g4(m, n, u, v):
    return ((0, -1, 2 * v - n), (0, -n, 1), (m, 0, 0))


def _g5(m, n, u, v):
    return ((0, 0, 0), (m, n, 0), (u, v, 0))


def _g6(m, n, u, v):
    return ((0, m, n), (0, u, v), (0, 0, 0))


def _g7(m, n, u, v):
    return ((-m, -n, -n), (m, n, n), (u, v, v))


@dataclass(frozen=True)
class FamilyDefinition:
    name: str
    table: _Table
    params: tuple[str, ...]
    # (label, predicate on numeric params); predicate True means satisfied
    constraints: tuple[tuple[str, Callable[[Mapping], bool]], ...] = ()
    # polynomial equalities with preferred solve order, used by the sampler
    equalities: tuple[tuple[str, tuple[str, ...]], ...] = ()
    inequalities: tuple[str, ...] = ()


FAMILY_DEFS: dict[str, FamilyDefinition] = {
    "G1": FamilyDefinition(
        "G1", _g1, ("m", "n"),
        (("m != 0", lambda p: p["m"] != 0),),
        inequalities=("m",),
    ),
    "G2": FamilyDefinition(
        "G2", _g2, ("m", "n", "u"),
        (("n != 0", lambda p: p["n"] != 0),),
        inequalities=("n",),
    ),
    "G3": FamilyDefinition("G3", _g3, ("m", "n", "u")),
    "G4": FamilyDefinition(
        "G4", _g4, ("m", "n", "v"),
        (("v = +1 or v = -1", lambda p: p["v"] in (1, -1)),),
        equalities=(("v^2 - 1", ("v",)),),
    ),
    "G5": FamilyDefinition(
        "G5", _g5, ("m", "n", "u", "v"),
        (
            ("m + v != 0", lambda p: p["m"] + p["v"] != 0),
            ("m*u + n*v = 0", lambda p: p["m"] * p["u"] + p["n"] * p["v"] == 0),
        ),
        equalities=(("m*u + n*v", ("u", "n")),),
        inequalities=("m + v",),
    ),
    "G6": FamilyDefinition(
        "G6", _g6, ("m", "n", "u", "v"),
        (
            ("m + v != 0", lambda p: p["m"] + p["v"] != 0),
            ("m*u - n*v = 0", lambda p: p["m"] * p["u"] - p["n"] * p["v"] == 0),
        ),
        equalities=(("m*u - n*v", ("u", "n")),),
        inequalities=("m + v",),
    ),
    "G7": FamilyDefinition(
        "G7", _g7, ("m", "n", "u", "v"),
        (
            ("m + v != 0", lambda p: p["m"] + p["v"] != 0),
            ("m*u = 0", lambda p: p["m"] * p["u"] == 0),
        ),
        equalities=(("m*u", ("u",)),),
        inequalities=("m + v",),
    ),
}

G2_AS_PRINTED = FamilyDefinition("G2 (as printed)", _g2_as_printed, ("m", "n", "u"))


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: Mapping[str, object] = field(default_factory=dict)
    mode: str = "numeric"  # or "symbolic"
    check_constraints: bool = True


def violated_constraints(family: str, params: Mapping[str, object]) -> list[str]:
    fdef = FAMILY_DEFS[family]
    return [label for label, ok in fdef.constraints if not ok(params)]


def _build(fdef: FamilyDefinition, values: Mapping[str, object], label: str) -> StructureConstants:
    args = {name: values.get(name, Fraction(0)) for name in ("m", "n", "u", "v")}
    rows = fdef.table(**args)
    return StructureConstants(tuple(FrameVector(tuple(canonical(x) for x in row)) for row in rows), label)


def make_family(spec: FamilySpec | str, params: Mapping[str, object] | None = None, **kw) -> StructureConstants:
    """Bracket table of one of the seven families.

    ``make_family("G3", {"m": 1, "n": 2, "u": 3})`` is shorthand for the
    numeric :class:`FamilySpec`; ``mode="symbolic"`` leaves the parameters as
    polynomial variables.
    """
    if isinstance(spec, str):
        spec = FamilySpec(spec, params or {}, **kw)
    if spec.family not in FAMILY_DEFS:
        raise ValueError(f"unknown family {spec.family!r}; expected one of {', '.join(FAMILIES)}")
    fdef = FAMILY_DEFS[spec.family]
    if spec.mode == "symbolic":
        values = {name: Poly.var(name) for name in fdef.params}
        log.debug("symbolic %s: constraints %s not enforced", spec.family, [c for c, _ in fdef.constraints])
    elif spec.mode == "numeric":
        unknown = sorted(set(spec.params) - set(fdef.params))
        if unknown:
            raise ValueError(f"{spec.family} has no parameter(s) {', '.join(unknown)}")
        missing = [p for p in fdef.params if p not in spec.params]
        if missing:
            raise ValueError(f"{spec.family} needs parameter(s) {', '.join(missing)}")
        values = dict(spec.params)
        if spec.check_constraints:
            bad = violated_constraints(spec.family, values)
            if bad:
                raise ConstraintViolation(f"{spec.family}: constraint violated: {'; '.join(bad)}")
    else:
        raise ValueError(f"unknown mode {spec.mode!r}")
    c = _build(fdef, values, spec.family)
    residual = jacobi_residual(c)
    if not residual.is_zero():
        raise JacobiError(f"internal table for {spec.family} fails Jacobi: residual {residual}")
    return c


def g2_as_printed(params: Mapping[str, object] | None = None) -> StructureConstants:
    """The G2 table exactly as printed (not a Lie algebra; kept for the audit)."""
    values = params if params is not None else {name: Poly.var(name) for name in ("m", "n", "u")}
    return _build(G2_AS_PRINTED, values, "G2 (as printed)")
