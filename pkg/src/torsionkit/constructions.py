"""Builders: tensor powers with cyclic symmetry, sums, cones, cellular and
Morse-style complexes, and restriction of scalars over monogenic orders.

Sign conventions.  The tensor differential is the graded Leibniz rule
d(x_1 ⊗ ... ⊗ x_p) = sum_k (-1)^(|x_1|+...+|x_(k-1)|) x_1 ⊗ ... ⊗ d x_k ⊗ ...
and the cyclic shift carries the Koszul sign
s(x_1 ⊗ ... ⊗ x_p) = (-1)^(|x_p| (|x_1|+...+|x_(p-1)|)) x_p ⊗ x_1 ⊗ ... ⊗ x_(p-1).
Both s^p = 1 and s d = d s are asserted at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .complexes import ChainComplex, ComplexError, GroupAction, require_valid, validate
from .matrices import LinalgError, Matrix, block_diag, det_exact


class ConstructionError(ValueError):
    pass


# ---------------------------------------------------------------------
# tensor powers with cyclic action
# ---------------------------------------------------------------------


def _degree_compositions(degrees: Sequence[int], p: int, total: int):
    """All p-tuples of degrees summing to total, lexicographic."""
    return (
        c
        for c in itertools.product(degrees, repeat=p)
        if sum(c) == total
    )


class _TensorIndexer:
    """Consistent basis enumeration of A^(tensor p) per total degree."""

    def __init__(self, A: ChainComplex, p: int):
        self.A = A
        self.p = p
        degs = list(A.degrees)
        self.min_total = p * A.min_degree
        self.max_total = p * (A.min_degree + len(A.ranks) - 1)
        self.blocks: dict[int, list[tuple[int, ...]]] = {}
        self.offsets: dict[int, dict[tuple[int, ...], int]] = {}
        self.ranks: dict[int, int] = {}
        for total in range(self.min_total, self.max_total + 1):
            comps = [
                c
                for c in _degree_compositions(degs, p, total)
                if all(A.rank_at(x) > 0 for x in c)
            ]
            self.blocks[total] = comps
            off = {}
            pos = 0
            for c in comps:
                off[c] = pos
                size = 1
                for x in c:
                    size *= A.rank_at(x)
                pos += size
            self.offsets[total] = off
            self.ranks[total] = pos

    def position(self, comp: tuple[int, ...], idx: tuple[int, ...]) -> int:
        pos = self.offsets[sum(comp)][comp]
        stride = 1
        flat = 0
        for deg, k in zip(reversed(comp), reversed(idx)):
            flat += k * stride
            stride *= self.A.rank_at(deg)
        return pos + flat

    def basis(self, total: int):
        for comp in self.blocks[total]:
            ranges = [range(self.A.rank_at(d)) for d in comp]
            for idx in itertools.product(*ranges):
                yield comp, idx


def tensor_power_cyclic(A: ChainComplex, p: int) -> ChainComplex:
    """A^(tensor p) with Koszul differential and order-p cyclic shift.

    The product gram (Kronecker products per composition block) is formed
    when A is metrized.  Validity (d^2 = 0, s^p = 1, s d = d s, isometry)
    is asserted on the result.
    """
    require_valid(A)
    if p < 2:
        raise ConstructionError("tensor power needs p >= 2")
    ti = _TensorIndexer(A, p)
    totals = list(range(ti.min_total, ti.max_total + 1))
    ranks = tuple(ti.ranks[t] for t in totals)

    diffs = []
    for t in totals[:-1]:
        rows = ti.ranks[t + 1]
        cols = ti.ranks[t]
        out = [[0] * cols for _ in range(rows)]
        for comp, idx in ti.basis(t):
            col = ti.position(comp, idx)
            sign = 1
            for k in range(p):
                dk = A.d(comp[k])
                if dk.rows:
                    new_comp = tuple(
                        c + (1 if m == k else 0) for m, c in enumerate(comp)
                    )
                    if all(A.rank_at(c) > 0 for c in new_comp):
                        for r in range(dk.rows):
                            coeff = dk.data[r][idx[k]]
                            if coeff:
                                new_idx = tuple(
                                    r if m == k else idx[m] for m in range(p)
                                )
                                row = ti.position(new_comp, new_idx)
                                out[row][col] += sign * coeff
                if comp[k] % 2:
                    sign = -sign
        diffs.append(Matrix(rows, cols, out))

    sigmas = []
    for t in totals:
        n = ti.ranks[t]
        out = [[0] * n for _ in range(n)]
        for comp, idx in ti.basis(t):
            col = ti.position(comp, idx)
            last = comp[-1]
            rest = sum(comp[:-1])
            sign = -1 if (last % 2) and (rest % 2) else 1
            new_comp = (comp[-1],) + comp[:-1]
            new_idx = (idx[-1],) + idx[:-1]
            row = ti.position(new_comp, new_idx)
            out[row][col] = sign
        sigmas.append(Matrix(n, n, out))

    gram = None
    if A.gram is not None:
        gram_blocks = []
        for t in totals:
            blocks = []
            for comp in ti.blocks[t]:
                g = Matrix.identity(1)
                for d in comp:
                    g = g.kron(A.gram_at(d))
                blocks.append(g)
            gram_blocks.append(block_diag(blocks) if blocks else Matrix.identity(0))
        gram = tuple(gram_blocks)

    out = ChainComplex(
        min_degree=ti.min_total,
        ranks=ranks,
        differentials=tuple(diffs),
        gram=gram,
        action=GroupAction(order=p, matrices=tuple(sigmas)),
    )
    report = validate(out)
    if not report.ok:
        raise ConstructionError(
            "tensor power failed validation: " + "; ".join(report.problems)
        )
    return out


def tensor_product(A: ChainComplex, B: ChainComplex) -> ChainComplex:
    """Binary graded tensor product (no action)."""
    require_valid(A)
    require_valid(B)
    min_total = A.min_degree + B.min_degree
    max_total = (A.min_degree + len(A.ranks) - 1) + (B.min_degree + len(B.ranks) - 1)
    totals = list(range(min_total, max_total + 1))
    blocks: dict[int, list[tuple[int, int]]] = {}
    offsets: dict[int, dict[tuple[int, int], int]] = {}
    ranks: dict[int, int] = {}
    for t in totals:
        blist = [
            (a, t - a)
            for a in A.degrees
            if B.rank_at(t - a) > 0 and A.rank_at(a) > 0
        ]
        blocks[t] = blist
        off = {}
        pos = 0
        for ab in blist:
            off[ab] = pos
            pos += A.rank_at(ab[0]) * B.rank_at(ab[1])
        offsets[t] = off
        ranks[t] = pos

    def position(a, b, i, j):
        return offsets[a + b][(a, b)] + i * B.rank_at(b) + j

    diffs = []
    for t in totals[:-1]:
        rows, cols = ranks[t + 1], ranks[t]
        out = [[0] * cols for _ in range(rows)]
        for (a, b) in blocks[t]:
            dA = A.d(a)
            dB = B.d(b)
            for i in range(A.rank_at(a)):
                for j in range(B.rank_at(b)):
                    col = position(a, b, i, j)
                    if dA.rows and A.rank_at(a + 1) and B.rank_at(b):
                        for r in range(dA.rows):
                            if dA.data[r][i]:
                                out[position(a + 1, b, r, j)][col] += dA.data[r][i]
                    if dB.rows and B.rank_at(b + 1) and A.rank_at(a):
                        s = -1 if a % 2 else 1
                        for r in range(dB.rows):
                            if dB.data[r][j]:
                                out[position(a, b + 1, i, r)][col] += s * dB.data[r][j]
        diffs.append(Matrix(rows, cols, out))

    gram = None
    if A.gram is not None and B.gram is not None:
        gram = tuple(
            block_diag([A.gram_at(a).kron(B.gram_at(b)) for (a, b) in blocks[t]])
            if blocks[t]
            else Matrix.identity(0)
            for t in totals
        )
    return ChainComplex(min_total, tuple(ranks[t] for t in totals), tuple(diffs), gram)


# ---------------------------------------------------------------------
# direct sums, cones
# ---------------------------------------------------------------------


def direct_sum(A: ChainComplex, B: ChainComplex, swap: bool = False) -> ChainComplex:
    """Degree-aligned direct sum; block differentials and block gram.

    With swap=True (requires B structurally equal to A) the result
    carries the order-2 action exchanging the two summands with no sign.
    """
    require_valid(A)
    require_valid(B)
    if swap and (A.min_degree, A.ranks, A.differentials) != (
        B.min_degree,
        B.ranks,
        B.differentials,
    ):
        raise ConstructionError("swap action requires two copies of the same complex")
    lo = min(A.min_degree, B.min_degree)
    hi = max(A.min_degree + len(A.ranks), B.min_degree + len(B.ranks))
    degs = list(range(lo, hi))
    ranks = tuple(A.rank_at(d) + B.rank_at(d) for d in degs)
    diffs = []
    for d in degs[:-1]:
        dA = A.d(d)
        dB = B.d(d)
        top = dA.hstack(Matrix.zeros(dA.rows, dB.cols))
        bottom = Matrix.zeros(dB.rows, dA.cols).hstack(dB)
        diffs.append(top.vstack(bottom))
    gram = None
    if A.gram is not None and B.gram is not None:
        gram = tuple(block_diag([A.gram_at(d), B.gram_at(d)]) for d in degs)
    action = None
    if swap:
        mats = []
        for d in degs:
            n = A.rank_at(d)
            z = Matrix.zeros(n, n)
            eye = Matrix.identity(n)
            mats.append(z.hstack(eye).vstack(eye.hstack(z)))
        action = GroupAction(order=2, matrices=tuple(mats))
    return ChainComplex(lo, ranks, tuple(diffs), gram, action)


def equivariant_direct_sum(A: ChainComplex, B: ChainComplex) -> ChainComplex:
    """Direct sum of two equivariant complexes of the same order."""
    if A.action is None or B.action is None or A.action.order != B.action.order:
        raise ConstructionError("summands must carry actions of the same order")
    plain = direct_sum(A.without_action(), B.without_action())
    mats = []
    for deg in plain.degrees:
        a = (
            A.action.matrices[A.index(deg)]
            if deg in A.degrees
            else Matrix.identity(0)
        )
        b = (
            B.action.matrices[B.index(deg)]
            if deg in B.degrees
            else Matrix.identity(0)
        )
        mats.append(block_diag([a, b]))
    return plain.with_action(GroupAction(order=A.action.order, matrices=tuple(mats)))


def cone_on_identity(B: ChainComplex) -> ChainComplex:
    """Mapping cone of the identity of B: acyclic, action carried along.

    Cone^i = B^(i+1) (+) B^i with d(x, y) = (-d x, x + d y).
    """
    require_valid(B)
    lo = B.min_degree - 1
    degs = list(range(lo, B.min_degree + len(B.ranks)))
    ranks = tuple(B.rank_at(d + 1) + B.rank_at(d) for d in degs)
    diffs = []
    for d in degs[:-1]:
        dx = B.d(d + 1)
        dy = B.d(d)
        top = (-dx).hstack(Matrix.zeros(dx.rows, dy.cols))
        eye = Matrix.identity(B.rank_at(d + 1))
        bottom_left = eye
        bottom = bottom_left.hstack(dy)
        diffs.append(top.vstack(bottom))
    gram = None
    if B.gram is not None:
        gram = tuple(
            block_diag([_gram_or_empty(B, d + 1), _gram_or_empty(B, d)]) for d in degs
        )
    action = None
    if B.action is not None:
        mats = tuple(
            block_diag([_action_or_empty(B, d + 1), _action_or_empty(B, d)])
            for d in degs
        )
        action = GroupAction(order=B.action.order, matrices=mats)
    return ChainComplex(lo, ranks, tuple(diffs), gram, action)


def _gram_or_empty(B: ChainComplex, d: int) -> Matrix:
    if d in B.degrees:
        return B.gram_at(d)
    return Matrix.identity(0)


def _action_or_empty(B: ChainComplex, d: int) -> Matrix:
    if d in B.degrees and B.action is not None:
        return B.action.matrices[B.index(d)]
    return Matrix.identity(B.rank_at(d))


# ---------------------------------------------------------------------
# CW data
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class CWData:
    """Cells per dimension with integer incidence numbers and an optional
    signed cell permutation of prime order.

    cells: tuple per dimension of cell identifiers (sorted lexicographically).
    incidence: {(upper_cell, lower_cell): coefficient} for adjacent dims.
    action: optional ({cell: (image_cell, sign)}, order).
    """

    cells: tuple[tuple[str, ...], ...]
    incidence: dict[tuple[str, str], int] = field(default_factory=dict)
    action_order: Optional[int] = None
    action_images: Optional[dict[str, tuple[str, int]]] = None

    def dimension(self) -> int:
        return len(self.cells) - 1

    def cell_index(self, dim: int) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.cells[dim])}

    def boundary_matrix(self, dim: int) -> Matrix:
        """Rows indexed by (dim-1)-cells, columns by dim-cells."""
        lower = self.cell_index(dim - 1)
        upper = self.cell_index(dim)
        out = [[0] * len(upper) for _ in range(len(lower))]
        for (u, l), coeff in self.incidence.items():
            if u in upper and l in lower:
                out[lower[l]][upper[u]] = coeff
        return Matrix(len(lower), len(upper), out)

    def chain_action_matrix(self, dim: int) -> Matrix:
        if self.action_images is None:
            return Matrix.identity(len(self.cells[dim]))
        idx = self.cell_index(dim)
        n = len(self.cells[dim])
        out = [[0] * n for _ in range(n)]
        for c in self.cells[dim]:
            img, sign = self.action_images[c]
            out[idx[img]][idx[c]] = sign
        return Matrix(n, n, out)

    def fixed_cells(self, dim: int) -> list[str]:
        if self.action_images is None:
            return list(self.cells[dim])
        return [
            c
            for c in self.cells[dim]
            if self.action_images[c][0] == c and self.action_images[c][1] == 1
        ]


def validate_cw(K: CWData) -> list[str]:
    problems = []
    for dim in range(1, len(K.cells)):
        if dim >= 2:
            b1 = K.boundary_matrix(dim)
            b2 = K.boundary_matrix(dim - 1)
            if not (b2 @ b1).is_zero():
                problems.append(f"boundary squared nonzero at dimension {dim}")
    if K.action_images is not None:
        if K.action_order is None or K.action_order < 2:
            problems.append("action images given without a valid order")
        else:
            p = K.action_order
            for dim in range(len(K.cells)):
                P = K.chain_action_matrix(dim)
                power = Matrix.identity(P.rows)
                for _ in range(p):
                    power = power @ P
                if power != Matrix.identity(P.rows):
                    problems.append(f"cell action order does not divide {p} at dim {dim}")
            for dim in range(1, len(K.cells)):
                b = K.boundary_matrix(dim)
                if K.chain_action_matrix(dim - 1) @ b != b @ K.chain_action_matrix(dim):
                    problems.append(f"cell action does not commute with boundary at dim {dim}")
            # faces of fixed cells must be fixed
            for dim in range(1, len(K.cells)):
                fixed = set(K.fixed_cells(dim))
                lower_fixed = set(K.fixed_cells(dim - 1))
                for (u, l), coeff in K.incidence.items():
                    if coeff and u in fixed and l in set(K.cells[dim - 1]):
                        if l not in lower_fixed:
                            problems.append(
                                f"face {l} of fixed cell {u} is not fixed"
                            )
    return problems


def cw_cochain_complex(K: CWData, coefficients: str = "integers", p: int | None = None):
    """Cochain complex of the cellular data.

    coefficients="integers": a metrized ChainComplex (indicator cochains
    orthonormal) carrying the transported action when the data has one.
    coefficients="mod", with p set: dimensions and differentials reduced
    mod p, as a ModPComplex.
    """
    problems = validate_cw(K)
    if problems:
        raise ConstructionError("invalid cellular data: " + "; ".join(problems))
    ranks = tuple(len(c) for c in K.cells)
    diffs = tuple(
        K.boundary_matrix(dim).transpose() for dim in range(1, len(K.cells))
    )
    if coefficients == "integers":
        gram = tuple(Matrix.identity(r) for r in ranks)
        action = None
        if K.action_images is not None:
            # signed permutations are orthogonal: the cochain action equals
            # the chain action matrix
            action = GroupAction(
                order=K.action_order,
                matrices=tuple(K.chain_action_matrix(d) for d in range(len(K.cells))),
            )
        return ChainComplex(0, ranks, diffs, gram, action)
    if coefficients == "mod":
        if p is None:
            raise ConstructionError("mod-p coefficients need p")
        return ModPComplex(
            p=p,
            dims=ranks,
            differentials=tuple(_reduce_mod(d, p) for d in diffs),
        )
    raise ConstructionError(f"unknown coefficient system {coefficients!r}")


# ---------------------------------------------------------------------
# mod-p complexes (for the descent comparison)
# ---------------------------------------------------------------------


def _reduce_mod(M: Matrix, p: int) -> Matrix:
    return Matrix(M.rows, M.cols, [[x % p for x in row] for row in M.data])


from .matrices import rank_mod as _rank_mod_p_impl


def _rank_mod_p(M: Matrix, p: int) -> int:
    return _rank_mod_p_impl(M, p)


@dataclass(frozen=True)
class ModPComplex:
    p: int
    dims: tuple[int, ...]
    differentials: tuple[Matrix, ...]

    def cohomology_dims(self) -> tuple[int, ...]:
        out = []
        for i, n in enumerate(self.dims):
            r_in = _rank_mod_p(self.differentials[i - 1], self.p) if i > 0 else 0
            r_out = (
                _rank_mod_p(self.differentials[i], self.p)
                if i < len(self.differentials)
                else 0
            )
            out.append(n - r_in - r_out)
        return tuple(out)

    def cohomology_orders(self) -> tuple[int, ...]:
        return tuple(self.p**d for d in self.cohomology_dims())


def quotient_relative_mod_p(K: CWData) -> ModPComplex:
    """Mod-p cochains of the free part of the quotient cell structure.

    Basis: orbits of non-fixed cells; differential induced by projecting
    boundaries to orbits.  This computes the compactly supported mod-p
    cohomology of the quotient minus the fixed points, which is the
    geometric side of the descent comparison.  Requires the action signs
    on non-fixed cells to be +1 (orientations compatible with the action).
    """
    if K.action_images is None or K.action_order is None:
        raise ConstructionError("quotient requires an action")
    p = K.action_order
    orbit_of: dict[str, str] = {}
    for dim in range(len(K.cells)):
        for c in K.cells[dim]:
            if c in orbit_of:
                continue
            orbit = [c]
            cur, sign = c, 1
            for _ in range(p - 1):
                img, s = K.action_images[cur]
                if img != cur and s != 1:
                    raise ConstructionError(
                        "quotient descent needs +1 signs on free orbits"
                    )
                cur = img
                orbit.append(cur)
            rep = min(orbit)
            for x in orbit:
                orbit_of[x] = rep
    free_orbits: list[list[str]] = []
    for dim in range(len(K.cells)):
        fixed = set(K.fixed_cells(dim))
        reps = sorted(
            {orbit_of[c] for c in K.cells[dim] if c not in fixed}
        )
        free_orbits.append(reps)
    dims = tuple(len(r) for r in free_orbits)
    diffs = []
    for dim in range(1, len(K.cells)):
        lower = {c: i for i, c in enumerate(free_orbits[dim - 1])}
        upper = free_orbits[dim]
        out = [[0] * len(lower) for _ in range(len(upper))]
        # cochain differential: entry (upper orbit u, lower orbit l) sums the
        # incidences of the representative u-cell with every cell in orbit l
        for uidx, u in enumerate(upper):
            for (cu, cl), coeff in K.incidence.items():
                if cu == u and orbit_of.get(cl) in lower:
                    out[uidx][lower[orbit_of[cl]]] = (
                        out[uidx][lower[orbit_of[cl]]] + coeff
                    ) % p
        diffs.append(Matrix(len(upper), len(lower), out))
    return ModPComplex(p=p, dims=dims, differentials=tuple(diffs))


# ---------------------------------------------------------------------
# Morse-style complexes
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class MSData:
    """Critical points with indices, signed flow lines and transports.

    critical_points: {id: morse_index}
    flow_lines: tuple of (source_id, target_id, sign, transport Matrix r x r)
    rank: coefficient rank r.
    """

    critical_points: dict[str, int]
    flow_lines: tuple[tuple[str, str, int, Matrix], ...]
    rank: int = 1


def morse_smale_complex(D: MSData) -> ChainComplex:
    """Complex generated by critical points graded by index.

    Degree-i rank is r * #{index-i points}; the differential adds
    sign * transport for every flow line between index-adjacent points.
    The assembled differential must square to zero; if it does not, the
    offending critical pair is reported.
    """
    if D.rank < 1:
        raise ConstructionError("coefficient rank must be positive")
    by_index: dict[int, list[str]] = {}
    for cid, ind in sorted(D.critical_points.items()):
        by_index.setdefault(ind, []).append(cid)
    if not by_index:
        return ChainComplex(0, (), ())
    lo, hi = min(by_index), max(by_index)
    degs = list(range(lo, hi + 1))
    order = {d: by_index.get(d, []) for d in degs}
    pos = {
        cid: i for d in degs for i, cid in enumerate(order[d])
    }
    ranks = tuple(D.rank * len(order[d]) for d in degs)
    blocks: dict[int, list[list[Optional[Matrix]]]] = {}
    for d in degs[:-1]:
        blocks[d] = [
            [None for _ in order[d]] for _ in order[d + 1]
        ]
    for src, dst, sign, transport in D.flow_lines:
        if src not in D.critical_points or dst not in D.critical_points:
            raise ConstructionError(f"flow line references unknown point {src}->{dst}")
        i = D.critical_points[src]
        if D.critical_points[dst] != i + 1:
            raise ConstructionError(
                f"flow line {src}->{dst} does not raise the index by one"
            )
        if sign not in (-1, 1):
            raise ConstructionError("flow line signs must be +-1")
        if transport.shape != (D.rank, D.rank) or not transport.is_integral():
            raise ConstructionError("transport must be an integral rank x rank matrix")
        if det_exact(transport) not in (1, -1):
            raise ConstructionError("transport must be invertible over Z")
        cell = blocks[i][pos[dst]][pos[src]]
        add = transport.scale(sign)
        blocks[i][pos[dst]][pos[src]] = add if cell is None else cell + add
    diffs = []
    for d in degs[:-1]:
        rows = D.rank * len(order[d + 1])
        cols = D.rank * len(order[d])
        out = [[0] * cols for _ in range(rows)]
        for bi, brow in enumerate(blocks[d]):
            for bj, blk in enumerate(brow):
                if blk is None:
                    continue
                for r in range(D.rank):
                    for c in range(D.rank):
                        out[bi * D.rank + r][bj * D.rank + c] = blk.data[r][c]
        diffs.append(Matrix(rows, cols, out))
    C = ChainComplex(
        lo,
        ranks,
        tuple(diffs),
        tuple(Matrix.identity(r) for r in ranks),
    )
    rep = validate(C)
    if not rep.ok:
        # locate the offending critical pair for the diagnostic
        for d in degs[:-2]:
            comp = C.d(d + 1) @ C.d(d)
            if not comp.is_zero():
                for r in range(comp.rows):
                    for c in range(comp.cols):
                        if comp.data[r][c]:
                            src = order[d][c // D.rank]
                            dst = order[d + 2][r // D.rank]
                            raise ConstructionError(
                                f"assembled differential does not square to zero: "
                                f"critical pair ({src}, {dst})"
                            )
        raise ConstructionError("invalid Morse data: " + "; ".join(rep.problems))
    return C


# ---------------------------------------------------------------------
# restriction of scalars over monogenic orders
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class OrderComplex:
    """Complex of modules over O = Z[x]/(f), entries as coefficient tuples.

    modulus: coefficients of the monic integer polynomial f, ascending,
    including the leading 1.
    differentials: per consecutive degree pair, matrices over O given as
    nested tuples of coefficient tuples (length deg f).
    """

    modulus: tuple[int, ...]
    min_degree: int
    ranks: tuple[int, ...]
    differentials: tuple[tuple[tuple[tuple[int, ...], ...], ...], ...]

    def __post_init__(self):
        if not self.modulus or self.modulus[-1] != 1 or len(self.modulus) < 2:
            raise ConstructionError("modulus must be monic of positive degree")

    @property
    def degree_of_field(self) -> int:
        return len(self.modulus) - 1


def _poly_mod(coeffs: Sequence[int], modulus: Sequence[int]) -> list:
    """Reduce a coefficient list modulo the monic polynomial."""
    m = len(modulus) - 1
    out = list(coeffs)
    while len(out) > m:
        lead = out.pop()
        if lead:
            for k in range(m):
                out[len(out) - m + k] -= lead * modulus[k]
    out += [0] * (m - len(out))
    return out


def multiplication_matrix(coeffs: Sequence[int], modulus: Sequence[int]) -> Matrix:
    """Matrix of multiplication by the element in the power basis."""
    m = len(modulus) - 1
    cols = []
    for k in range(m):
        shifted = [0] * k + list(coeffs)
        cols.append(_poly_mod(shifted, modulus))
    return Matrix(m, m, [[cols[j][i] for j in range(m)] for i in range(m)])


def restrict_scalars(P: OrderComplex) -> ChainComplex:
    """View each O-module of rank n as Z^(n deg f) with expanded differentials."""
    m = P.degree_of_field
    ranks = tuple(r * m for r in P.ranks)
    diffs = []
    for i, dmat in enumerate(P.differentials):
        rows, cols = P.ranks[i + 1], P.ranks[i]
        if len(dmat) != rows or any(len(r) != cols for r in dmat):
            raise ConstructionError(f"differential {i} has wrong shape")
        out = [[0] * (cols * m) for _ in range(rows * m)]
        for r in range(rows):
            for c in range(cols):
                blk = multiplication_matrix(dmat[r][c], P.modulus)
                for a in range(m):
                    for b in range(m):
                        out[r * m + a][c * m + b] = blk.data[a][b]
        diffs.append(Matrix(rows * m, cols * m, out))
    C = ChainComplex(P.min_degree, ranks, tuple(diffs))
    require_valid(C)
    return C


# ---------------------------------------------------------------------
# built-in fixtures
# ---------------------------------------------------------------------


def cw_point() -> CWData:
    """A single point with the trivial action."""
    return CWData(
        cells=(("pt",),),
        incidence={},
        action_order=2,
        action_images={"pt": ("pt", 1)},
    )


def cw_triangle_circle() -> CWData:
    """Circle as 3 vertices and 3 edges, no action; edge k runs v_k -> v_(k+1)."""
    return CWData(
        cells=(("v0", "v1", "v2"), ("e0", "e1", "e2")),
        incidence={
            ("e0", "v1"): 1,
            ("e0", "v0"): -1,
            ("e1", "v2"): 1,
            ("e1", "v1"): -1,
            ("e2", "v0"): 1,
            ("e2", "v2"): -1,
        },
    )


def cw_rotation_circle() -> CWData:
    """Circle as 3 vertices / 3 edges with the free rotation of order 3."""
    K = cw_triangle_circle()
    return CWData(
        cells=K.cells,
        incidence=K.incidence,
        action_order=3,
        action_images={
            "v0": ("v1", 1),
            "v1": ("v2", 1),
            "v2": ("v0", 1),
            "e0": ("e1", 1),
            "e1": ("e2", 1),
            "e2": ("e0", 1),
        },
    )


def cw_reflection_circle() -> CWData:
    """Circle as 2 vertices / 2 edges; the reflection fixes both vertices
    and swaps the edges (both oriented from v0 to v1)."""
    return CWData(
        cells=(("v0", "v1"), ("e0", "e1")),
        incidence={
            ("e0", "v1"): 1,
            ("e0", "v0"): -1,
            ("e1", "v1"): 1,
            ("e1", "v0"): -1,
        },
        action_order=2,
        action_images={
            "v0": ("v0", 1),
            "v1": ("v1", 1),
            "e0": ("e1", 1),
            "e1": ("e0", 1),
        },
    )


def morse_circle() -> MSData:
    """Height function on the circle: one minimum, one maximum, two flow
    lines with opposite signs and trivial transport."""
    eye = Matrix.identity(1)
    return MSData(
        critical_points={"min": 0, "max": 1},
        flow_lines=(("min", "max", 1, eye), ("min", "max", -1, eye)),
        rank=1,
    )


def morse_point() -> MSData:
    return MSData(critical_points={"pt": 0}, flow_lines=(), rank=1)


def morse_sphere_min_max() -> MSData:
    """Sphere with only a minimum (index 0) and a maximum (index 2)."""
    return MSData(critical_points={"min": 0, "max": 2}, flow_lines=(), rank=1)


def elementary_complex(k: int, degree: int = 0) -> ChainComplex:
    """The two-term complex Z --k--> Z starting at the given degree."""
    return ChainComplex(
        min_degree=degree,
        ranks=(1, 1),
        differentials=(Matrix(1, 1, [[k]]),),
    )


# ---------------------------------------------------------------------
# torsion over the fraction field of a monogenic order
# ---------------------------------------------------------------------


class NumberAlgebra:
    """Arithmetic in Q[x]/(f) for a monic integer polynomial f.

    Elements are coefficient tuples of Fractions (length deg f).
    Division requires the divisor to be invertible modulo f; over an
    irreducible f this is every nonzero element.
    """

    def __init__(self, modulus: Sequence[int]):
        if not modulus or modulus[-1] != 1 or len(modulus) < 2:
            raise ConstructionError("modulus must be monic of positive degree")
        self.modulus = tuple(int(c) for c in modulus)
        self.deg = len(modulus) - 1

    def element(self, coeffs: Sequence) -> tuple:
        out = [Fraction(c) for c in coeffs]
        if len(out) > self.deg:
            out = self._reduce(out)
        out += [Fraction(0)] * (self.deg - len(out))
        return tuple(out)

    def zero(self) -> tuple:
        return self.element([])

    def one(self) -> tuple:
        return self.element([1])

    def is_zero(self, a: tuple) -> bool:
        return all(c == 0 for c in a)

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: tuple, b: tuple) -> tuple:
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        return tuple(-x for x in a)

    def _reduce(self, coeffs: list) -> list:
        m = self.deg
        out = list(coeffs)
        while len(out) > m:
            lead = out.pop()
            if lead:
                for k in range(m):
                    out[len(out) - m + k] -= lead * self.modulus[k]
        out += [Fraction(0)] * (m - len(out))
        return out

    def mul(self, a: tuple, b: tuple) -> tuple:
        prod = [Fraction(0)] * (2 * self.deg - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return tuple(self._reduce(prod))

    def inv(self, a: tuple) -> tuple:
        """Inverse modulo f via the extended Euclidean algorithm in Q[x]."""
        if self.is_zero(a):
            raise ConstructionError("division by zero in the fraction field")

        def poly_divmod(num, den):
            num = list(num)
            out = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
            while len(num) >= len(den) and any(c != 0 for c in num):
                while num and num[-1] == 0:
                    num.pop()
                if len(num) < len(den):
                    break
                c = num[-1] / den[-1]
                k = len(num) - len(den)
                out[k] = c
                for i, d in enumerate(den):
                    num[k + i] -= c * d
                num.pop()
            return out, num

        f = [Fraction(c) for c in self.modulus]
        r0, r1 = f, [c for c in a]
        while r1 and r1[-1] == 0:
            r1.pop()
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while any(c != 0 for c in r1):
            q, rem = poly_divmod(r0, r1)
            r0, r1 = r1, rem
            while r1 and r1[-1] == 0:
                r1.pop()
            qs1 = [Fraction(0)] * (len(q) + len(s1) - 1) if q and s1 else []
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    qs1[i + j] += x * y
            new_s = [Fraction(0)] * max(len(s0), len(qs1))
            for i, x in enumerate(s0):
                new_s[i] += x
            for i, x in enumerate(qs1):
                new_s[i] -= x
            s0, s1 = s1, new_s
        while r0 and r0[-1] == 0:
            r0.pop()
        if len(r0) != 1:
            raise ConstructionError(
                "element is a zero divisor: the modulus is not irreducible"
            )
        c = r0[0]
        return self.element([x / c for x in s0])

    def det(self, entries: list[list[tuple]]) -> tuple:
        """Determinant over the algebra by elimination with division."""
        n = len(entries)
        if n == 0:
            return self.one()
        a = [[e for e in row] for row in entries]
        out = self.one()
        sign = 1
        for k in range(n):
            piv = None
            for i in range(k, n):
                if not self.is_zero(a[i][k]):
                    piv = i
                    break
            if piv is None:
                return self.zero()
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            pk = a[k][k]
            out = self.mul(out, pk)
            inv = self.inv(pk)
            for i in range(k + 1, n):
                if not self.is_zero(a[i][k]):
                    f = self.mul(a[i][k], inv)
                    for j in range(k, n):
                        a[i][j] = self.sub(a[i][j], self.mul(f, a[k][j]))
        if sign < 0:
            out = self.neg(out)
        return out

    def norm(self, a: tuple) -> Fraction:
        """Norm down to Q: determinant of multiplication by the element."""
        cols = []
        for k in range(self.deg):
            shifted = [Fraction(0)] * k + list(a)
            cols.append(self._reduce(shifted))
        M = Matrix(
            self.deg,
            self.deg,
            [[cols[j][i] for j in range(self.deg)] for i in range(self.deg)],
        )
        return Fraction(det_exact(M))


def _algebra_matrix(P: OrderComplex, alg: NumberAlgebra, i: int) -> list[list[tuple]]:
    return [
        [alg.element(entry) for entry in row] for row in P.differentials[i]
    ]


def _algebra_pivot_columns(alg: NumberAlgebra, rows: list[list[tuple]], cols: int) -> list[int]:
    work = [[e for e in row] for row in rows]
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, len(work)):
            if not alg.is_zero(work[i][c]):
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = alg.inv(work[r][c])
        work[r] = [alg.mul(inv, e) for e in work[r]]
        for i in range(len(work)):
            if i != r and not alg.is_zero(work[i][c]):
                f = work[i][c]
                work[i] = [
                    alg.sub(work[i][j], alg.mul(f, work[r][j])) for j in range(cols)
                ]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return pivots


def rt_over_fraction_field(P: OrderComplex) -> tuple:
    """Reidemeister torsion of the acyclic complex P tensored with the
    fraction field of its order, with the standard volume forms.

    Value is an element of Q[x]/(f); the alternating-product convention is
    the same one used by rt_volume_forms.
    """
    alg = NumberAlgebra(P.modulus)
    n_deg = len(P.ranks)
    mats = [_algebra_matrix(P, alg, i) for i in range(n_deg - 1)]
    complements: dict[int, list[int]] = {}
    for i in range(n_deg):
        if i < n_deg - 1 and P.ranks[i + 1] > 0 and P.ranks[i] > 0:
            complements[i] = _algebra_pivot_columns(alg, mats[i], P.ranks[i])
        else:
            complements[i] = []
    result = alg.one()
    inverted = alg.one()
    for i in range(n_deg):
        n = P.ranks[i]
        cols: list[list[tuple]] = []
        if i > 0 and complements[i - 1]:
            for c in complements[i - 1]:
                cols.append([mats[i - 1][r][c] for r in range(n)])
        for c in complements[i]:
            unit = [alg.zero()] * n
            unit[c] = alg.one()
            cols.append(unit)
        if len(cols) != n:
            raise ConstructionError(
                "complex is not acyclic over the fraction field"
            )
        entries = [[cols[j][r] for j in range(n)] for r in range(n)]
        det = alg.det(entries)
        if alg.is_zero(det):
            raise ConstructionError("complex is not acyclic over the fraction field")
        m_i = alg.inv(det)
        deg = P.min_degree + i
        if deg % 2 == 0:
            result = alg.mul(result, m_i)
        else:
            inverted = alg.mul(inverted, m_i)
    return alg.mul(result, alg.inv(inverted))


def norm_of_torsion(P: OrderComplex) -> "TorsionValue":
    """Alternating product of the restricted complex's cohomology orders.

    Returns prod_i |H^i(restriction of P)|^((-1)^(i+1)) as an exact
    TorsionValue and cross-checks it against |Norm(RT over the fraction
    field)|; the parity is the one that makes the two sides agree (an
    order O --a--> O concentrated in degrees 0, 1 yields |Norm(a)|).
    """
    from .torsionvalue import TorsionValue
    from .complexes import cohomology, is_rationally_acyclic

    C = restrict_scalars(P)
    if not is_rationally_acyclic(C):
        raise ConstructionError("norm of torsion requires a rationally acyclic complex")
    rep = cohomology(C, with_regulators=False)
    out = TorsionValue.one()
    for entry in rep.by_degree:
        if entry.torsion_order != 1:
            sign = -1 if entry.degree % 2 == 0 else 1
            out = out * TorsionValue.from_integer(entry.torsion_order) ** sign
    alg = NumberAlgebra(P.modulus)
    rt = rt_over_fraction_field(P)
    norm = abs(alg.norm(rt))
    if TorsionValue.from_rational(norm) != out:
        raise ConstructionError(
            f"norm compatibility violated: |Norm(RT)| = {norm} but the "
            f"alternating cohomology product is {out!r}"
        )
    return out


def relative_nonfixed_mod_p(K: CWData) -> ModPComplex:
    """Mod-p cochains supported on the non-fixed cells (cover level).

    These form a subcomplex because faces of fixed cells are fixed; it
    computes the compactly supported mod-p cohomology of the complement
    of the fixed point set before dividing by the action.
    """
    if K.action_order is None:
        raise ConstructionError("relative complex requires an action")
    p = K.action_order
    nonfixed = []
    for dim in range(len(K.cells)):
        fixed = set(K.fixed_cells(dim))
        nonfixed.append([c for c in K.cells[dim] if c not in fixed])
    dims = tuple(len(c) for c in nonfixed)
    diffs = []
    for dim in range(1, len(K.cells)):
        lower = {c: i for i, c in enumerate(nonfixed[dim - 1])}
        upper = {c: i for i, c in enumerate(nonfixed[dim])}
        out = [[0] * len(lower) for _ in range(len(upper))]
        for (u, l), coeff in K.incidence.items():
            if u in upper and l in lower:
                out[upper[u]][lower[l]] = coeff % p
        diffs.append(Matrix(len(upper), len(lower), out))
    return ModPComplex(p=p, dims=dims, differentials=tuple(diffs))
