"""Independent oracles used by the tests.

These deliberately avoid the library's own reduction algorithms: elementary
divisors come from exhaustive minor-gcd enumeration (their classical
definition), eigenvalue products from floating point eigensolvers, and
torsion cohomology orders from the cokernel of the raw differential.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd

import numpy as np

from torsionkit.matrices import Matrix


def laplace_det(rows: list[list[int]]) -> int:
    """Determinant by Laplace expansion (tiny matrices only)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * laplace_det(minor)
    return total


def minor_gcd_divisors(M: Matrix) -> list[int]:
    """Elementary divisors d_k = g_k / g_(k-1) with g_k the gcd of all
    k x k minors, enumerated exhaustively."""
    rows = [list(r) for r in M.data]
    n, m = M.rows, M.cols
    gs = [1]
    for k in range(1, min(n, m) + 1):
        g = 0
        for ri in itertools.combinations(range(n), k):
            for ci in itertools.combinations(range(m), k):
                sub = [[rows[i][j] for j in ci] for i in ri]
                g = gcd(g, abs(laplace_det(sub)))
        gs.append(g)
        if g == 0:
            break
    divisors = []
    for k in range(1, len(gs)):
        if gs[k] == 0:
            break
        divisors.append(gs[k] // gs[k - 1])
    return divisors


def cokernel_torsion_order(M: Matrix) -> int:
    """|torsion of Z^rows / column span of M| from minor gcds.

    The torsion subgroup of the cokernel is the saturation of the column
    span modulo the span itself; its order is the product of the nonzero
    elementary divisors, i.e. the gcd of the maximal-rank minors.
    """
    out = 1
    for d in minor_gcd_divisors(M):
        out *= d
    return out


def brute_torsion_orders(C) -> dict[int, int]:
    """|H^i(C)_tors| per degree, via the cokernel of d_(i-1) alone.

    For any complex (d after d equals zero), the torsion of
    ker d_i / im d_(i-1) coincides with the torsion of the full cokernel
    of d_(i-1): the quotient of the cocycle lattice by the saturation of
    the coboundary lattice is torsion free.
    """
    return {
        deg: cokernel_torsion_order(C.d(deg - 1)) for deg in C.degrees
    }


def numeric_nonzero_eigen_product(M: Matrix, expected_rank: int) -> float:
    """Product of the nonzero eigenvalues via numpy (symmetric input)."""
    arr = np.array([[float(x) for x in row] for row in M.data], dtype=float)
    if arr.size == 0:
        return 1.0
    evals = np.linalg.eigvalsh((arr + arr.T) / 2)
    nonzero = sorted(evals, key=abs, reverse=True)[:expected_rank]
    assert all(abs(v) > 1e-9 * (1 + abs(evals).max()) for v in nonzero)
    out = 1.0
    for v in nonzero:
        out *= v
    return out


def numeric_log_tau(C) -> float:
    """Untwisted analytic torsion via numpy eigensolves."""
    import numpy.linalg as la

    total = 0.0
    for deg in C.degrees:
        n = C.rank_at(deg)
        if n == 0 or deg == 0:
            continue
        from torsionkit.complexes import laplacian

        delta = laplacian(C, deg)
        G = C.gram_at(deg)
        Gf = np.array([[float(Fraction(x)) for x in row] for row in G.data])
        Df = np.array([[float(Fraction(x)) for x in row] for row in delta.data])
        L = la.cholesky(Gf)
        B = L.T @ Df @ la.inv(L.T)
        evals = la.eigvalsh((B + B.T) / 2)
        scale = 1 + abs(evals).max() if evals.size else 1.0
        sign = -1 if deg % 2 else 1
        for v in evals:
            if abs(v) > 1e-9 * scale:
                total += 0.5 * sign * deg * float(np.log(v))
    return total
