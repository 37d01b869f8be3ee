"""Straight-line sympy evaluation of the defining formulas.

Written directly from the coordinate-free definitions (Koszul formula, Yano
correction terms, curvature, contracted Ricci) with explicit matrices, so it
shares no code with the production index formulas.
"""

from __future__ import annotations

import sympy as sp

m, n, u, v = sp.symbols("m n u v")
G = sp.diag(1, 1, -1)
J = sp.diag(1, 1, -1)
E = [sp.Matrix([1, 0, 0]), sp.Matrix([0, 1, 0]), sp.Matrix([0, 0, 1])]

TABLES = {
    "G1": [(m, 0, -n), (-m, -n, 0), (n, m, m)],
    "G2": [(0, n, -u), (0, -u, -n), (m, 0, 0)],
    "G3": [(0, 0, -u), (0, -n, 0), (m, 0, 0)],
    "G4": [(0, -1, 2 * v - n), (0, -n, 1), (m, 0, 0)],
    "G5": [(0, 0, 0), (m, n, 0), (u, v, 0)],
    "G6": [(0, m, n), (0, u, v), (0, 0, 0)],
    "G7": [(-m, -n, -n), (m, n, n), (u, v, v)],
}


class Algebra:
    def __init__(self, table):
        self.b = {
            (0, 1): sp.Matrix(table[0]),
            (0, 2): sp.Matrix(table[1]),
            (1, 2): sp.Matrix(table[2]),
        }

    def br(self, x, y):
        out = sp.zeros(3, 1)
        for (i, j), w in self.b.items():
            out += (x[i] * y[j] - x[j] * y[i]) * w
        return out

    @staticmethod
    def g(x, y):
        return (x.T * G * y)[0, 0]

    def lc(self, x, y):
        # 2 g(nabla_x y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y) for constant fields
        coeffs = []
        for k in range(3):
            z = E[k]
            val = (self.g(self.br(x, y), z) - self.g(self.br(y, z), x) + self.g(self.br(z, x), y)) / 2
            coeffs.append(val / self.g(z, z))
        return sp.Matrix(coeffs)

    def dJ(self, x, y):
        return self.lc(x, J * y) - J * self.lc(x, y)

    def yano(self, x, y):
        return (
            self.lc(x, y)
            - sp.Rational(1, 2) * self.dJ(y, J * x)
            - sp.Rational(1, 4) * (self.dJ(x, J * y) - self.dJ(J * x, y))
        )

    def curvature(self, x, y, z):
        def nab(a, b_vec):
            # nabla_a of a field with constant coefficients b_vec
            return self.yano(a, b_vec)

        # nabla_x (nabla_y z) with nabla_y z constant-coefficient in the frame
        return nab(x, nab(y, z)) - nab(y, nab(x, z)) - nab(self.br(x, y), z)

    def ricci(self):
        w = (-1, -1, 1)
        out = sp.zeros(3, 3)
        for i in range(3):
            for j in range(3):
                out[i, j] = sum(w[k] * self.g(self.curvature(E[i], E[k], E[j]), E[k]) for k in range(3))
        return out.applyfunc(sp.expand)

    def symmetrized_ricci(self):
        r = self.ricci()
        return ((r + r.T) / 2).applyfunc(sp.expand)

    def yano_table(self):
        return [[self.yano(E[i], E[j]).applyfunc(sp.expand) for j in range(3)] for i in range(3)]

    def lc_table(self):
        return [[self.lc(E[i], E[j]).applyfunc(sp.expand) for j in range(3)] for i in range(3)]


def family(name: str, subs: dict | None = None) -> Algebra:
    table = TABLES[name]
    if subs:
        table = [tuple(sp.sympify(x).subs(subs) for x in row) for row in table]
    return Algebra(table)
