"""Exact coefficient arithmetic.

Rationals are :class:`fractions.Fraction`. Polynomials live in the fixed
ring Q[m, n, u, v] and are kept in canonical graded-lex order, so two
polynomials are mathematically equal exactly when their term tuples are.
:class:`QuadraticSurd` extends Q by a single square root and is only used
when a sampled parameter constraint has no rational solution.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Callable, Mapping, Union

VARIABLES = ("m", "n", "u", "v")
_NVARS = len(VARIABLES)
_ZERO_EXP = (0,) * _NVARS


class MissingVariableError(KeyError):
    """An evaluation assignment does not cover a variable of the polynomial."""


class ParseError(ValueError):
    pass


def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


class Poly:
    """Polynomial in Q[m, n, u, v], immutable and canonical."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], Fraction] | None = None):
        items = []
        for exp, coeff in (terms or {}).items():
            if coeff:
                items.append((tuple(exp), Fraction(coeff)))
        items.sort(key=lambda t: _grlex_key(t[0]), reverse=True)
        self.terms: tuple[tuple[tuple[int, ...], Fraction], ...] = tuple(items)
        self._hash = None

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({_ZERO_EXP: Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        exp = [0] * _NVARS
        exp[VARIABLES.index(name)] = 1
        return cls({tuple(exp): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == _ZERO_EXP)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return self.terms[0][1] if self.terms else Fraction(0)

    def variables(self) -> set[str]:
        return {VARIABLES[i] for exp, _ in self.terms for i, e in enumerate(exp) if e}

    def degree_in(self, name: str) -> int:
        i = VARIABLES.index(name)
        return max((exp[i] for exp, _ in self.terms), default=0)

    def _dict(self) -> dict:
        return dict(self.terms)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        acc = self._dict()
        for exp, c in other.terms:
            acc[exp] = acc.get(exp, 0) + c
        return Poly(acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly({exp: -c for exp, c in self.terms})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        acc: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                exp = tuple(a + b for a, b in zip(e1, e2))
                acc[exp] = acc.get(exp, 0) + c1 * c2
        return Poly(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by a nonzero constant; no polynomial division here
        if isinstance(other, Poly):
            other = other.constant_value()
        other = Fraction(other)
        if other == 0:
            raise ZeroDivisionError("polynomial division by zero")
        return Poly({exp: c / other for exp, c in self.terms})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.constant_value()) if self.is_constant() else hash(self.terms)
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # evaluation -----------------------------------------------------------

    def eval(self, assignment: Mapping[str, object]):
        """Substitute values for every variable occurring in the polynomial.

        Values may be any field elements supporting ``+`` and ``*`` with
        Fractions (Fraction, int, QuadraticSurd).
        """
        needed = self.variables()
        missing = sorted(needed - set(assignment))
        if missing:
            raise MissingVariableError(f"no value for variable(s) {', '.join(missing)}")
        vals = [assignment.get(name) for name in VARIABLES]
        total = Fraction(0)
        for exp, c in self.terms:
            term = c
            for val, e in zip(vals, exp):
                if e:
                    term = term * val**e
            total = term + total
        return total

    def subs(self, assignment: Mapping[str, object]) -> "Poly":
        """Partial substitution; unassigned variables stay symbolic."""
        result = Poly()
        for exp, c in self.terms:
            term = Poly.const(c)
            for name, e in zip(VARIABLES, exp):
                if not e:
                    continue
                if name in assignment:
                    term = term * _as_poly(assignment[name]) ** e
                else:
                    term = term * Poly.var(name) ** e
            result = result + term
        return result

    def univariate_coeffs(self, name: str) -> list[Fraction]:
        """Coefficients (lowest degree first) of a polynomial in one variable."""
        extra = self.variables() - {name}
        if extra:
            raise ValueError(f"polynomial still depends on {sorted(extra)}")
        i = VARIABLES.index(name)
        coeffs = [Fraction(0)] * (self.degree_in(name) + 1)
        for exp, c in self.terms:
            coeffs[exp[i]] += c
        return coeffs

    def drop_multiples_of(self, monomial: tuple[int, ...]) -> "Poly":
        """Reduce modulo the monomial ideal generated by ``monomial``."""
        return Poly(
            {exp: c for exp, c in self.terms if not all(a >= b for a, b in zip(exp, monomial))}
        )

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Poly({format_scalar(self)!r})"


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    return NotImplemented


class QuadraticSurd:
    """Element a + b*sqrt(d) of Q(sqrt(d)), d a squarefree integer > 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError("mixing different quadratic extensions")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        norm = self.a * self.a - self.d * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in quadratic extension")
        return QuadraticSurd(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        result = QuadraticSurd(1, 0, self.d)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b) == (other.a, other.b) and (self.b == 0 or self.d == other.d)
        return NotImplemented

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __str__(self):
        return format_scalar(self)

    __repr__ = __str__


Scalar = Union[Fraction, Poly]


# rendering -------------------------------------------------------------------


def format_rational(r) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def _format_monomial(exp: tuple[int, ...]) -> str:
    parts = []
    for name, e in zip(VARIABLES, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for idx, (exp, c) in enumerate(p.terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        mono = _format_monomial(exp)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def format_scalar(x) -> str:
    """Canonical text form used in reports and fixture files."""
    if isinstance(x, Poly):
        return _format_poly(x)
    if isinstance(x, QuadraticSurd):
        if x.b == 0:
            return format_rational(x.a)
        root = f"sqrt({x.d})"
        tail = root if abs(x.b) == 1 else f"{format_rational(abs(x.b))}*{root}"
        if x.a == 0:
            return tail if x.b > 0 else f"-{tail}"
        return f"{format_rational(x.a)} {'+' if x.b > 0 else '-'} {tail}"
    return format_rational(x)


# parsing ---------------------------------------------------------------------


_BINOPS: dict[type, Callable] = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
}


def evaluate_expression(text: str, env: Mapping[str, object], *, divide=None):
    """Evaluate an arithmetic expression over the names in ``env``.

    Grammar: integers, names, ``+ - * /``, ``^`` or ``**`` with a
    non-negative integer exponent, parentheses, and ``sqrt(k)`` for a
    non-negative integer k when ``sqrt`` is supplied in ``env``. Names not
    in ``env`` raise :class:`ParseError`.
    """
    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    div = divide or (lambda a, b: a / b)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(
            node.value, bool
        ):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ParseError(f"undefined symbol {node.id!r} in {text!r}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                k = ev(node.right)
                if not isinstance(k, Fraction) or k.denominator != 1 or k < 0:
                    raise ParseError(f"exponent must be a non-negative integer in {text!r}")
                return ev(node.left) ** int(k)
            if isinstance(node.op, ast.Div):
                return div(ev(node.left), ev(node.right))
            op = _BINOPS.get(type(node.op))
            if op is not None:
                return op(ev(node.left), ev(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and "sqrt" in env
            and len(node.args) == 1
        ):
            return env["sqrt"](ev(node.args[0]))
        raise ParseError(f"unsupported syntax in {text!r}")

    return ev(tree)


_POLY_ENV = {name: Poly.var(name) for name in VARIABLES}


def parse_poly(text: str) -> Poly:
    """Parse a polynomial over {m, n, u, v}; division only by constants."""
    result = evaluate_expression(text, _POLY_ENV)
    return result if isinstance(result, Poly) else Poly.const(result)


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        raise ParseError(f"not a rational: {text!r}") from None


def parse_scalar(text: str) -> Scalar:
    """Parse canonical text; constants come back as Fraction."""
    p = parse_poly(text)
    return p.constant_value() if p.is_constant() else p


def sqrt_rational(r):
    """Square root of a non-negative rational in Q or a quadratic extension."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("square root of a negative rational")
    if r == 0:
        return Fraction(0)
    num, den = r.numerator * r.denominator, r.denominator * r.denominator
    # sqrt(num/den) with den a perfect square
    free, square = _squarefree_split(num)
    outer = Fraction(square, r.denominator)
    if free == 1:
        return outer
    return QuadraticSurd(0, outer, free)


def _squarefree_split(k: int) -> tuple[int, int]:
    """Return (f, s) with k = f * s**2 and f squarefree."""
    free, square = 1, 1
    p = 2
    while p * p <= k:
        while k % (p * p) == 0:
            k //= p * p
            square *= p
        if k % p == 0:
            k //= p
            free *= p
        p += 1
    return free * k, square


# scalar helpers --------------------------------------------------------------


def is_zero(x) -> bool:
    if isinstance(x, Poly):
        return x.is_zero()
    return x == 0


def canonical(x) -> Scalar:
    """Demote constant polynomials to Fraction; leave everything else."""
    if isinstance(x, Poly) and x.is_constant():
        return x.constant_value()
    if isinstance(x, int):
        return Fraction(x)
    return x


def add(a, b):
    return canonical(a + b)


def sub(a, b):
    return canonical(a - b)


def mul(a, b):
    return canonical(a * b)


def div(a, b) -> Fraction:
    """Exact rational quotient; raises ZeroDivisionError when b == 0."""
    return Fraction(a) / Fraction(b)


def scalar_arith(a, b, op: str):
    try:
        fn = {"add": add, "sub": sub, "mul": mul}[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(a, b)


def to_field(x, assignment: Mapping[str, object]):
    """Evaluate a scalar (rational or polynomial) at an assignment."""
    if isinstance(x, Poly):
        return x.eval(assignment)
    return x


def poly_eval(p, assignment: Mapping[str, object]):
    if isinstance(p, Poly):
        return p.eval(assignment)
    return Fraction(p)

