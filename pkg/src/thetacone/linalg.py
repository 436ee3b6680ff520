"""Small exact linear algebra over the rationals.

Everything here works on lists of tuples of Fractions/ints; sizes are tiny
(desk-scale cone and moduli computations), so plain Gaussian elimination is
plenty.
"""

from fractions import Fraction
from itertools import combinations


def _echelon(rows):
    """Row-reduce a copy of ``rows``; returns (echelon rows, pivot columns)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = Fraction(1) / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows):
    if not rows:
        return 0
    return len(_echelon(rows)[0])


def kernel_basis(rows):
    """Basis of {x : rows @ x = 0} as tuples of Fractions."""
    if not rows:
        return []
    ncols = len(rows[0])
    ech, pivots = _echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -ech[i][f]
        basis.append(tuple(vec))
    return basis


def solve(rows, rhs):
    """One rational solution of rows @ x = rhs, or None if inconsistent."""
    if not rows:
        return None if any(rhs) else ()
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    ech, pivots = _echelon(aug)
    for row in ech:
        if all(x == 0 for x in row[:ncols]) and row[ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        if p == ncols:
            return None
        x[p] = ech[i][ncols] - sum(ech[i][c] * x[c] for c in range(p + 1, ncols))
    # back-substitution above relied on reduced echelon form, so x is exact
    return tuple(x)


def det(rows):
    """Determinant by fraction-free-ish elimination (small matrices)."""
    n = len(rows)
    mat = [[Fraction(x) for x in row] for row in rows]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if mat[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            mat[c], mat[pivot] = mat[pivot], mat[c]
            sign = -sign
        result *= mat[c][c]
        inv = Fraction(1) / mat[c][c]
        for i in range(c + 1, n):
            if mat[i][c] != 0:
                f = mat[i][c] * inv
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return result * sign


def _clear_denominators(vec):
    from math import gcd, lcm

    denom = lcm(*[f.denominator for f in vec]) if vec else 1
    ints = [int(f * denom) for f in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def nonneg_kernel_rays(rows, nvars=None):
    """Extreme rays of {x >= 0 : rows @ x = 0}, as primitive integer tuples.

    Support-subset enumeration; fine for the handfuls of variables that moduli
    cones and curve-class lattices have.
    """
    if nvars is None:
        if not rows:
            raise ValueError("need nvars when the system is empty")
        nvars = len(rows[0])
    rays = []
    for size in range(1, nvars + 1):
        for supp in combinations(range(nvars), size):
            sub = [[row[j] for j in supp] for row in rows] if rows else []
            basis = kernel_basis(sub) if sub else [
                tuple(Fraction(i == k) for i in range(size)) for k in range(size)
            ]
            if len(basis) != 1:
                continue
            gen = basis[0]
            if all(x >= 0 for x in gen):
                pass
            elif all(x <= 0 for x in gen):
                gen = tuple(-x for x in gen)
            else:
                continue
            if all(x == 0 for x in gen):
                continue
            full = [Fraction(0)] * nvars
            for j, x in zip(supp, gen):
                full[j] = x
            ray = _clear_denominators(full)
            support = frozenset(j for j in range(nvars) if ray[j])
            if any(frozenset(j for j in range(nvars) if r[j]) < support for r in rays):
                continue
            if ray not in rays:
                rays.append(ray)
    # drop rays whose support strictly contains another ray's support
    minimal = []
    supports = [frozenset(j for j in range(nvars) if r[j]) for r in rays]
    for i, ray in enumerate(rays):
        if not any(supports[j] < supports[i] for j in range(len(rays)) if j != i):
            minimal.append(ray)
    return sorted(set(minimal))
