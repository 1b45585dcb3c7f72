"""Exact dense linear algebra over Z and Q.

Everything here is arbitrary precision: integer matrices use Python ints,
rational matrices use fractions.Fraction.  No floating point anywhere.

The main entry points are smith_normal_form, saturated_kernel,
charpoly (Berkowitz, division-free), pseudo_determinant and det_exact.
All algorithms are deterministic: pivot selection is by smallest nonzero
absolute value with row-major tie breaking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence


class LinalgError(ValueError):
    """An operation's matrix preconditions were violated."""


def _norm_entry(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, bool):
        return int(x)
    raise LinalgError(f"entry {x!r} is not an exact integer or rational")


class Matrix:
    """Immutable dense matrix with exact entries (int or Fraction)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, entries: Sequence[Sequence]):
        entries = [list(row) for row in entries]
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise LinalgError(f"shape mismatch: expected {rows}x{cols}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(
            self, "data", tuple(tuple(_norm_entry(x) for x in row) for row in entries)
        )

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, entries: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        entries = [list(r) for r in entries]
        if entries:
            cols = len(entries[0]) if cols is None else cols
        elif cols is None:
            cols = 0
        return cls(len(entries), cols, entries)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def column(cls, vec: Sequence) -> "Matrix":
        return cls(len(vec), 1, [[x] for x in vec])

    # -- basics --------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key):
        i, j = key
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def col(self, j: int) -> tuple:
        return tuple(self.data[i][j] for i in range(self.rows))

    def to_lists(self) -> list[list]:
        return [list(r) for r in self.data]

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self.data for x in row)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        return all(
            self.data[i][j] == self.data[j][i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and all(
                self.data[i][j] == other.data[i][j]
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {[list(r) for r in self.data]})"

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in addition")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.data[i][j] + other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in subtraction")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.data[i][j] - other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        return Matrix(
            self.rows,
            self.cols,
            [[c * x for x in row] for row in self.data],
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise LinalgError(
                f"shape mismatch in product: {self.shape} @ {other.shape}"
            )
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            ri = self.data[i]
            out.append(
                [sum(ri[k] * cj[k] for k in range(self.cols)) for cj in ocols]
            )
        return Matrix(self.rows, other.cols, out)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols,
            self.rows,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise LinalgError("row mismatch in hstack")
        return Matrix(
            self.rows,
            self.cols + other.cols,
            [list(self.data[i]) + list(other.data[i]) for i in range(self.rows)],
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise LinalgError("col mismatch in vstack")
        return Matrix(
            self.rows + other.rows,
            self.cols,
            [list(r) for r in self.data] + [list(r) for r in other.data],
        )

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix(
            len(row_idx),
            len(col_idx),
            [[self.data[i][j] for j in col_idx] for i in row_idx],
        )

    def kron(self, other: "Matrix") -> "Matrix":
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    a = self.data[i][j]
                    row.extend(a * other.data[k][m] for m in range(other.cols))
                out.append(row)
        return Matrix(self.rows * other.rows, self.cols * other.cols, out)


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[r0 + i][c0 + j] = b.data[i][j]
        r0 += b.rows
        c0 += b.cols
    return Matrix(rows, cols, out)


# ---------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class SNFResult:
    """U @ M @ V == D with U, V unimodular and D diagonal with divisor chain."""

    U: Matrix
    D: Matrix
    V: Matrix
    divisors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len([d for d in self.divisors if d != 0])

    @property
    def nontrivial_divisors(self) -> tuple[int, ...]:
        return tuple(d for d in self.divisors if d > 1)

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.nontrivial_divisors:
            out *= d
        return out


def _check_integral(M: Matrix, op: str) -> None:
    if not M.is_integral():
        raise LinalgError(f"{op} requires an integral matrix")


def smith_normal_form(M: Matrix) -> SNFResult:
    """Smith normal form over Z with accumulated unimodular transforms.

    Pivot selection: smallest nonzero absolute value, ties broken in
    row-major order, so the output is deterministic.  The identity
    U @ M @ V == D is re-verified before returning.
    """
    _check_integral(M, "smith_normal_form")
    n, m = M.rows, M.cols
    a = [list(row) for row in M.data]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for r in a:
                r[i], r[j] = r[j], r[i]
            for r in v:
                r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):
        # row[dst] += c * row[src]
        asrc, adst = a[src], a[dst]
        for k in range(m):
            adst[k] += c * asrc[k]
        usrc, udst = u[src], u[dst]
        for k in range(n):
            udst[k] += c * usrc[k]

    def add_col(src, dst, c):
        for r in a:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(n, m)
    while t < limit:
        # locate pivot: smallest |entry| != 0 in the trailing block
        best = None
        for i in range(t, n):
            ai = a[i]
            for j in range(t, m):
                x = ai[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        if a[t][t] < 0:
            negate_row(t)

        while True:
            # clear column t below the pivot
            progress = False
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    if q:
                        add_row(t, i, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        if a[t][t] < 0:
                            negate_row(t)
                        progress = True
            if progress:
                continue
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    if q:
                        add_col(t, j, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        progress = True
            if progress:
                continue
            # pivot must divide the whole trailing block
            bad = None
            piv = a[t][t]
            for i in range(t + 1, n):
                ai = a[i]
                for j in range(t + 1, m):
                    if ai[j] % piv != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        t += 1

    divisors = tuple(a[k][k] for k in range(limit))
    D = Matrix(n, m, a)
    U = Matrix(n, n, u)
    V = Matrix(m, m, v)
    if U @ M @ V != D:
        raise LinalgError("internal error: U @ M @ V != D after reduction")
    nz = [d for d in divisors if d != 0]
    for i in range(len(nz) - 1):
        if nz[i + 1] % nz[i] != 0:
            raise LinalgError("internal error: divisor chain broken")
    if any(d == 0 for d in divisors) and divisors[-1] != 0:
        raise LinalgError("internal error: zero divisor out of place")
    return SNFResult(U=U, D=D, V=V, divisors=divisors)


def saturated_kernel(M: Matrix) -> Matrix:
    """Basis (columns) of {v in Z^cols : M v = 0}.

    The integer kernel of an integer matrix is automatically saturated:
    the quotient lattice is torsion free.  Output columns are put in
    Hermite form, so the basis is canonical.
    """
    _check_integral(M, "saturated_kernel")
    snf = smith_normal_form(M)
    zero_idx = [k for k, d in enumerate(snf.divisors) if d == 0]
    zero_idx += list(range(min(M.rows, M.cols), M.cols))
    cols = [snf.V.col(k) for k in zero_idx]
    if not cols:
        return Matrix.zeros(M.cols, 0)
    basis_rows = hermite_row_basis(Matrix.from_rows([list(c) for c in cols], M.cols))
    return basis_rows.transpose()


def hermite_row_basis(M: Matrix) -> Matrix:
    """Canonical basis of the lattice spanned by the rows of M.

    Row-style Hermite normal form with positive pivots and entries above
    each pivot reduced into [0, pivot).  Zero rows are dropped.
    """
    _check_integral(M, "hermite_row_basis")
    rows = [list(r) for r in M.data if any(x != 0 for x in r)]
    basis: list[list[int]] = []
    cols = M.cols
    for c in range(cols):
        if not rows:
            break
        live = [r for r in rows if r[c] != 0]
        rest = [r for r in rows if r[c] == 0]
        if not live:
            continue
        # gcd-reduce rows with a nonzero entry in column c down to one pivot
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            p = live[0]
            for r in live[1:]:
                q = r[c] // p[c]
                if q:
                    for k in range(cols):
                        r[k] -= q * p[k]
            survivors = [p]
            for r in live[1:]:
                if r[c] != 0:
                    survivors.append(r)
                elif any(x != 0 for x in r):
                    rest.append(r)
            live = survivors
        pivot = live[0]
        if pivot[c] < 0:
            pivot[:] = [-x for x in pivot]
        for b in basis:
            q = b[c] // pivot[c]
            if q:
                for k in range(cols):
                    b[k] -= q * pivot[k]
        basis.append(pivot)
        rows = [r for r in rest if any(x != 0 for x in r)]
    return Matrix.from_rows(basis, cols)


def lattice_column_basis(generators: Matrix) -> Matrix:
    """Canonical column basis of the lattice generated by the given columns."""
    return hermite_row_basis(generators.transpose()).transpose()


# ---------------------------------------------------------------------
# determinants, characteristic polynomial, rank
# ---------------------------------------------------------------------


def _det_bareiss_int(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ai = a[i]
            ak = a[k]
            for j in range(k + 1, n):
                ai[j] = (ai[j] * akk - aik * ak[j]) // prev
            ai[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _clear_denominators(M: Matrix) -> tuple[list[list[int]], Fraction]:
    """Return (kM as int lists, k) for the smallest positive k clearing M."""
    k = 1
    for row in M.data:
        for x in row:
            if isinstance(x, Fraction):
                k = k * x.denominator // gcd(k, x.denominator)
    out = []
    for row in M.data:
        out.append([int(x * k) for x in row])
    return out, Fraction(k)


def det_exact(M: Matrix):
    """Exact determinant (int for integral input, Fraction otherwise)."""
    if M.rows != M.cols:
        raise LinalgError("determinant of a non-square matrix")
    if M.rows == 0:
        return 1
    if M.is_integral():
        return _det_bareiss_int([list(r) for r in M.data])
    a, k = _clear_denominators(M)
    d = _det_bareiss_int(a)
    return _norm_entry(Fraction(d) / k**M.rows)


def charpoly(M: Matrix) -> list:
    """Coefficients [c_0, ..., c_n] of det(x I - M) = sum c_k x^(n-k).

    Division-free Berkowitz recursion; exact over Z and Q, with c_0 = 1.
    """
    if M.rows != M.cols:
        raise LinalgError("characteristic polynomial of a non-square matrix")
    n = M.rows
    if n == 0:
        return [1]
    A = M.data
    poly = [1, -A[0][0]]
    for i in range(1, n):
        a = A[i][i]
        R = [A[i][j] for j in range(i)]
        C = [A[j][i] for j in range(i)]
        items = [1, -a]
        vec = C
        for _ in range(i - 1):
            items.append(-sum(R[k] * vec[k] for k in range(i)))
            vec = [sum(A[p][q] * vec[q] for q in range(i)) for p in range(i)]
        items.append(-sum(R[k] * vec[k] for k in range(i)))
        new = []
        for k in range(i + 2):
            acc = 0
            for mdeg in range(min(k, i) + 1):
                idx = k - mdeg
                if idx < len(items):
                    acc += items[idx] * poly[mdeg]
            new.append(acc)
        poly = new
    return [_norm_entry(Fraction(c)) if not isinstance(c, int) else c for c in poly]


def pseudo_determinant(M: Matrix):
    """Product of the nonzero eigenvalues of a symmetric PSD matrix.

    Computed as the top nonvanishing signed coefficient of the
    characteristic polynomial: with det(xI - M) = sum_k c_k x^(n-k) the
    elementary symmetric functions are e_k = (-1)^k c_k, positivity of
    all e_k certifies positive semidefiniteness, and the result is e_r
    for r = rank M.  Returns 1 for the zero matrix.
    """
    if not M.is_symmetric():
        raise LinalgError("pseudo_determinant requires a symmetric matrix")
    coeffs = charpoly(M)
    n = M.rows
    e = [(-1) ** k * coeffs[k] for k in range(n + 1)]
    for k in range(1, n + 1):
        if e[k] < 0:
            raise LinalgError(
                f"matrix is not positive semidefinite: e_{k} = {e[k]} < 0"
            )
    r = 0
    for k in range(n, 0, -1):
        if e[k] != 0:
            r = k
            break
    return _norm_entry(Fraction(e[r])) if not isinstance(e[r], int) else e[r]


def rank(M: Matrix) -> int:
    """Rank; via SNF for integral matrices, fraction-free elimination otherwise."""
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.is_integral():
        return smith_normal_form(M).rank
    a, _ = _clear_denominators(M)
    return _rank_int(a)


def _rank_int(a: list[list[int]]) -> int:
    rows = [r for r in a if any(x != 0 for x in r)]
    if not rows:
        return 0
    cols = len(rows[0])
    r = 0
    c = 0
    while r < len(rows) and c < cols:
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            c += 1
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prc = rows[r][c]
        for i in range(r + 1, len(rows)):
            x = rows[i][c]
            if x:
                ri = rows[i]
                rr = rows[r]
                g = gcd(x, prc)
                mul_r = prc // g
                mul_p = x // g
                for k in range(c, cols):
                    ri[k] = ri[k] * mul_r - rr[k] * mul_p
        r += 1
        c += 1
    return r


# ---------------------------------------------------------------------
# rational elimination: solve, nullspace, inverse, pivots
# ---------------------------------------------------------------------


def _rref(rows: list[list[Fraction]], cols: int) -> tuple[list[list[Fraction]], list[int]]:
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve_exact(A: Matrix, B: Matrix) -> Matrix:
    """One exact solution X of A X = B; raises LinalgError if inconsistent."""
    if A.rows != B.rows:
        raise LinalgError("shape mismatch in solve")
    aug = [
        [Fraction(A.data[i][j]) for j in range(A.cols)]
        + [Fraction(B.data[i][j]) for j in range(B.cols)]
        for i in range(A.rows)
    ]
    rows, pivots = _rref(aug, A.cols + B.cols)
    for i in range(len(rows)):
        if all(rows[i][j] == 0 for j in range(A.cols)) and any(
            rows[i][A.cols + j] != 0 for j in range(B.cols)
        ):
            raise LinalgError("inconsistent linear system")
    X = [[Fraction(0)] * B.cols for _ in range(A.cols)]
    for r, c in enumerate(pivots):
        if c < A.cols:
            for j in range(B.cols):
                X[c][j] = rows[r][A.cols + j]
    return Matrix(A.cols, B.cols, X)


def nullspace(M: Matrix) -> Matrix:
    """Rational kernel basis (columns); free variables set to 1."""
    rows = [[Fraction(x) for x in r] for r in M.data]
    rows, pivots = _rref(rows, M.cols)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * M.cols
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][fc]
        basis.append(v)
    if not basis:
        return Matrix.zeros(M.cols, 0)
    return Matrix.from_rows(basis, M.cols).transpose()


def pivot_columns(M: Matrix) -> list[int]:
    """Leftmost column indices forming a basis of the column space."""
    rows = [[Fraction(x) for x in r] for r in M.data]
    _, pivots = _rref(rows, M.cols)
    return pivots


def inverse(M: Matrix) -> Matrix:
    if M.rows != M.cols:
        raise LinalgError("inverse of a non-square matrix")
    X = solve_exact(M, Matrix.identity(M.rows))
    if M @ X != Matrix.identity(M.rows):
        raise LinalgError("matrix is singular")
    return X


def solve_integer(A: Matrix, B: Matrix) -> Matrix:
    """Solve A X = B and assert the solution is integral."""
    X = solve_exact(A, B)
    if A @ X != B:
        raise LinalgError("inconsistent system in solve_integer")
    if not X.is_integral():
        raise LinalgError("solution is not integral")
    return X


def pdet_on_invariant_subspace(op: Matrix, gram: Matrix, basis: Matrix):
    """Product of nonzero eigenvalues of a gram-self-adjoint PSD operator
    restricted to the invariant subspace spanned by the basis columns.

    Uses det(C^T G op C) / det(C^T G C) on a column basis C of the image
    of the restriction, which avoids any characteristic polynomial work.
    """
    if basis.cols == 0:
        return 1
    image = op @ basis
    piv = pivot_columns(image)
    if not piv:
        return 1
    C = image.submatrix(range(image.rows), piv)
    CtG = C.transpose() @ gram
    num = det_exact(CtG @ (op @ C))
    den = det_exact(CtG @ C)
    if den == 0:
        raise LinalgError("degenerate gram restriction")
    val = Fraction(num) / Fraction(den)
    if val <= 0:
        raise LinalgError("operator is not positive semidefinite on the subspace")
    return _norm_entry(val)


def rank_mod(M: Matrix, p: int) -> int:
    """Rank of an integral matrix over the field with p elements."""
    _check_integral(M, "rank_mod")
    a = [[x % p for x in row] for row in M.data]
    rows, cols = len(a), (len(a[0]) if a else 0)
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r
