"""Exact linear algebra helpers backed by sympy.

Only two services are needed: inverting square matrices over Z[a1, a2]
whose determinant is a unit, and integer Smith normal forms for homology.
"""

from __future__ import annotations

import sympy
from sympy.matrices.normalforms import invariant_factors

from .rings import PolyAlpha

_SYMS = sympy.symbols("a1 a2 a3")


def to_sympy(p: PolyAlpha):
    expr = sympy.Integer(0)
    for exps, c in p.items():
        term = sympy.Integer(c)
        for s, e in zip(_SYMS, exps):
            if e:
                term *= s ** e
        expr += term
    return expr


def from_sympy(expr) -> PolyAlpha:
    poly = sympy.Poly(sympy.expand(expr), *_SYMS)
    terms = {}
    for exps, c in poly.terms():
        if c != int(c):
            raise ValueError(f"non-integer coefficient {c}")
        terms[tuple(int(e) for e in exps)] = int(c)
    return PolyAlpha(terms)


class NotInvertible(ValueError):
    pass


def _unit_pivot_inverse(mat):
    """Gauss-Jordan elimination using only pivots equal to +1 or -1.

    Returns the inverse, or None when no unit pivot is available at some step.
    """
    n = len(mat)
    one = PolyAlpha(1)
    a = [list(row) + [one if i == j else PolyAlpha() for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] in (one, -one)), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        if a[col][col] == -one:
            a[col] = [-x for x in a[col]]
        prow = a[col]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y if not y.is_zero() else x for x, y in zip(a[r], prow)]
    return [row[n:] for row in a]


def inverse_poly_matrix(mat):
    """Inverse of a square PolyAlpha matrix with unit determinant.

    Elimination with unit pivots is tried first; otherwise sympy computes
    the adjugate.  Either way the result is checked by multiplying back with
    PolyAlpha arithmetic.
    """
    n = len(mat)
    if n == 0:
        return []
    inv = _unit_pivot_inverse(mat)
    if inv is not None:
        _check_inverse(mat, inv)
        return inv
    M = sympy.Matrix([[to_sympy(x) for x in row] for row in mat])
    det = sympy.expand(M.det(method="berkowitz"))
    if det not in (1, -1):
        raise NotInvertible(f"determinant {det} is not a unit")
    adj = M.adjugate(method="berkowitz")
    inv = [[from_sympy(adj[i, j] * det) for j in range(n)] for i in range(n)]
    _check_inverse(mat, inv)
    return inv


def _check_inverse(mat, inv):
    n = len(mat)
    for i in range(n):
        for j in range(n):
            s = PolyAlpha()
            for k in range(n):
                if not mat[i][k].is_zero() and not inv[k][j].is_zero():
                    s = s + mat[i][k] * inv[k][j]
            if s != PolyAlpha(1 if i == j else 0):
                raise NotInvertible("inverse check failed")


def poly_det(mat):
    if not mat:
        return PolyAlpha(1)
    M = sympy.Matrix([[to_sympy(x) for x in row] for row in mat])
    return from_sympy(M.det(method="berkowitz"))


def smith_invariants(rows):
    """Nonzero invariant factors of an integer matrix given as a list of rows."""
    if not rows or not rows[0]:
        return []
    M = sympy.Matrix(rows)
    if M.is_zero_matrix:
        return []
    facs = invariant_factors(M, domain=sympy.ZZ)
    return [abs(int(f)) for f in facs if f != 0]
