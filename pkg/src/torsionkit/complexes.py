"""Finite cochain complexes of free abelian groups with optional metrics.

A complex is a graded family of lattices Z^(rank_i) indexed by degree,
with integer differentials d_i : A^i -> A^(i+1), optional symmetric
positive definite rational Gram matrices per degree, and an optional
cyclic group action commuting with the differentials.

Conventions (fixed once, used everywhere in this package):

* alternating sums are sum_i (-1)^i x_i over the true degree i;
* log tau(C) := (1/2) sum_j (-1)^j * j * log pdet(Delta_j), where
  Delta_j = d_{j-1} d*_{j-1} + d*_j d_j and adjoints are taken with
  respect to the Gram matrices.  With this scaling, a rationally acyclic
  complex with unit-covolume lattices satisfies
  log tau = sum_i (-1)^i log |H^i_tors| exactly;
* Z(0) := sum_j (-1)^j * j * rank(Delta_j) and
  Z'(0) := -2 log tau (the derivative of the spectral zeta combination).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .matrices import (
    LinalgError,
    Matrix,
    det_exact,
    pdet_on_invariant_subspace,
    pivot_columns,
    rank,
    saturated_kernel,
    smith_normal_form,
    solve_exact,
    solve_integer,
)
from .torsionvalue import DEFAULT_FACTOR_BOUND, TorsionValue


class ComplexError(ValueError):
    """A complex fails the preconditions of the requested operation."""


def _sign(i: int) -> int:
    return -1 if i % 2 else 1


@dataclass(frozen=True)
class GroupAction:
    """Order-p cyclic action: one integer matrix per degree."""

    order: int
    matrices: tuple[Matrix, ...]

    def matrix(self, idx: int) -> Matrix:
        return self.matrices[idx]


@dataclass(frozen=True)
class ChainComplex:
    min_degree: int
    ranks: tuple[int, ...]
    differentials: tuple[Matrix, ...]
    gram: Optional[tuple[Matrix, ...]] = None
    action: Optional[GroupAction] = None

    def __post_init__(self):
        if len(self.differentials) != max(len(self.ranks) - 1, 0):
            raise ComplexError("need exactly one differential per consecutive pair")
        for i, d in enumerate(self.differentials):
            if d.shape != (self.ranks[i + 1], self.ranks[i]):
                raise ComplexError(
                    f"differential {i} has shape {d.shape}, expected "
                    f"({self.ranks[i + 1]}, {self.ranks[i]})"
                )
        if self.gram is not None and len(self.gram) != len(self.ranks):
            raise ComplexError("need one gram matrix per degree")
        if self.action is not None and len(self.action.matrices) != len(self.ranks):
            raise ComplexError("need one action matrix per degree")

    # -- indexing helpers ---------------------------------------------

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.min_degree + len(self.ranks))

    def index(self, degree: int) -> int:
        return degree - self.min_degree

    def rank_at(self, degree: int) -> int:
        if degree in self.degrees:
            return self.ranks[self.index(degree)]
        return 0

    def d(self, degree: int) -> Matrix:
        """Differential out of the given degree (zero map off the support)."""
        idx = self.index(degree)
        if 0 <= idx < len(self.differentials):
            return self.differentials[idx]
        return Matrix.zeros(self.rank_at(degree + 1), self.rank_at(degree))

    def gram_at(self, degree: int) -> Matrix:
        if self.gram is None:
            raise ComplexError("complex carries no metric")
        idx = self.index(degree)
        if 0 <= idx < len(self.gram):
            return self.gram[idx]
        return Matrix.identity(0)

    def has_gram(self) -> bool:
        return self.gram is not None

    def is_integral(self) -> bool:
        return all(d.is_integral() for d in self.differentials)

    def total_rank(self) -> int:
        return sum(self.ranks)

    def with_gram(self, gram: Sequence[Matrix]) -> "ChainComplex":
        return ChainComplex(
            self.min_degree, self.ranks, self.differentials, tuple(gram), self.action
        )

    def with_action(self, action: GroupAction) -> "ChainComplex":
        return ChainComplex(
            self.min_degree, self.ranks, self.differentials, self.gram, action
        )

    def without_action(self) -> "ChainComplex":
        return ChainComplex(
            self.min_degree, self.ranks, self.differentials, self.gram, None
        )


def identity_gram(C: ChainComplex) -> ChainComplex:
    return C.with_gram(tuple(Matrix.identity(r) for r in C.ranks))


# ---------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _is_positive_definite(G: Matrix) -> bool:
    # Sylvester: all leading principal minors positive (exact).
    if not G.is_symmetric():
        return False
    for k in range(1, G.rows + 1):
        idx = list(range(k))
        if det_exact(G.submatrix(idx, idx)) <= 0:
            return False
    return True


def validate(C: ChainComplex) -> ValidationReport:
    """Check every structural invariant; reports, never raises."""
    problems: list[str] = []
    for i, deg in enumerate(C.degrees):
        if i + 2 < len(C.ranks):
            comp = C.differentials[i + 1] @ C.differentials[i]
            if not comp.is_zero():
                bad = next(
                    (r, c)
                    for r in range(comp.rows)
                    for c in range(comp.cols)
                    if comp.data[r][c] != 0
                )
                problems.append(
                    f"d∘d != 0 out of degree {deg}: entry {bad} is {comp.data[bad[0]][bad[1]]}"
                )
    if C.gram is not None:
        for i, deg in enumerate(C.degrees):
            G = C.gram[i]
            if G.shape != (C.ranks[i], C.ranks[i]):
                problems.append(f"gram at degree {deg} has wrong shape {G.shape}")
                continue
            if not _is_positive_definite(G):
                problems.append(f"gram at degree {deg} is not symmetric positive definite")
    if C.action is not None:
        p = C.action.order
        if p < 2:
            problems.append("action order must be at least 2")
        for i, deg in enumerate(C.degrees):
            s = C.action.matrices[i]
            if s.shape != (C.ranks[i], C.ranks[i]):
                problems.append(f"action at degree {deg} has wrong shape {s.shape}")
                continue
            if not s.is_integral():
                problems.append(f"action at degree {deg} is not integral")
                continue
            power = Matrix.identity(C.ranks[i])
            for _ in range(p):
                power = power @ s
            if power != Matrix.identity(C.ranks[i]):
                problems.append(f"action at degree {deg} does not have order dividing {p}")
            if i + 1 < len(C.ranks):
                lhs = C.action.matrices[i + 1] @ C.differentials[i]
                rhs = C.differentials[i] @ s
                if lhs != rhs:
                    problems.append(f"action does not commute with d out of degree {deg}")
            if C.gram is not None:
                G = C.gram[i]
                if s.transpose() @ G @ s != G:
                    problems.append(f"action at degree {deg} is not a gram isometry")
    return ValidationReport(ok=not problems, problems=problems)


def require_valid(C: ChainComplex) -> None:
    report = validate(C)
    if not report.ok:
        raise ComplexError("invalid complex: " + "; ".join(report.problems))


def unit_covolume(C: ChainComplex) -> bool:
    """True when every degree's lattice has covolume 1 (det gram = 1)."""
    if C.gram is None:
        raise ComplexError("complex carries no metric")
    return all(det_exact(G) == 1 for G in C.gram)


# ---------------------------------------------------------------------
# integer cohomology and regulators
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeCohomology:
    degree: int
    free_rank: int
    divisors: tuple[int, ...]
    torsion_order: int
    regulator_sq: Optional[Fraction]


@dataclass(frozen=True)
class CohomologyReport:
    by_degree: tuple[DegreeCohomology, ...]

    def at(self, degree: int) -> DegreeCohomology:
        for entry in self.by_degree:
            if entry.degree == degree:
                return entry
        return DegreeCohomology(degree, 0, (), 1, None)

    def torsion_orders(self) -> dict[int, int]:
        return {e.degree: e.torsion_order for e in self.by_degree}

    def is_rationally_acyclic(self) -> bool:
        return all(e.free_rank == 0 for e in self.by_degree)


def cocycle_basis(C: ChainComplex, degree: int) -> Matrix:
    """Saturated basis (columns) of the degree-i cocycle lattice."""
    idx = C.index(degree)
    if idx + 1 < len(C.ranks):
        return saturated_kernel(C.differentials[idx])
    return Matrix.identity(C.rank_at(degree))


def cohomology(C: ChainComplex, with_regulators: bool | None = None) -> CohomologyReport:
    """Integer cohomology with elementary divisors, plus regulators when metrized.

    free_rank_i = dim ker(d_i over Q) - rank(d_{i-1}); the torsion divisors
    are the nontrivial Smith divisors of d_{i-1} rewritten in coordinates on
    the saturated cocycle lattice.  regulator_sq is the Gram determinant of
    the harmonic projections of an integral basis of the free quotient.
    """
    if not C.is_integral():
        raise ComplexError("integer cohomology requires integral differentials")
    require_valid(C)
    if with_regulators is None:
        with_regulators = C.gram is not None
    if with_regulators and C.gram is None:
        raise ComplexError("regulators requested but the complex carries no metric")

    entries = []
    for deg in C.degrees:
        Z = cocycle_basis(C, deg)
        z = Z.cols
        prev = C.d(deg - 1)
        if prev.cols == 0 or z == 0:
            X = Matrix.zeros(z, prev.cols)
        else:
            X = solve_integer(Z, prev)
        snf = smith_normal_form(X) if X.rows and X.cols else None
        if snf is None:
            divisors: tuple[int, ...] = ()
            r = 0
        else:
            divisors = snf.nontrivial_divisors
            r = snf.rank
        free_rank = z - r
        torsion_order = 1
        for dd in divisors:
            torsion_order *= dd
        reg: Optional[Fraction] = None
        if with_regulators:
            reg = _regulator_square(C, deg, Z, snf, free_rank)
        entries.append(
            DegreeCohomology(
                degree=deg,
                free_rank=free_rank,
                divisors=divisors,
                torsion_order=torsion_order,
                regulator_sq=reg,
            )
        )
    report = CohomologyReport(by_degree=tuple(entries))
    lhs = sum(_sign(e.degree) * e.free_rank for e in entries)
    rhs = sum(_sign(deg) * C.rank_at(deg) for deg in C.degrees)
    if lhs != rhs:
        raise ComplexError("internal error: Euler characteristic mismatch")
    return report


def _regulator_square(
    C: ChainComplex, degree: int, Z: Matrix, snf, free_rank: int
) -> Fraction:
    if free_rank == 0:
        return Fraction(1)
    # lift a basis of the free quotient of the cocycle lattice by the
    # saturation of the coboundary lattice
    if snf is None or snf.U.rows == 0:
        lift_coords = Matrix.identity(Z.cols)
        chosen = lift_coords
    else:
        Uinv = _unimodular_inverse(snf.U)
        r = snf.rank
        chosen = Uinv.submatrix(range(Uinv.rows), range(r, Uinv.cols))
    reps = Z @ chosen  # ambient integral cocycles spanning the free part
    harm = [_harmonic_projection(C, degree, reps.col(j)) for j in range(reps.cols)]
    G = C.gram_at(degree)
    gram = [
        [_inner(G, harm[a], harm[b]) for b in range(len(harm))]
        for a in range(len(harm))
    ]
    return Fraction(det_exact(Matrix.from_rows(gram, len(harm))))


def _unimodular_inverse(U: Matrix) -> Matrix:
    from .matrices import inverse

    inv = inverse(U)
    if not inv.is_integral():
        raise ComplexError("internal error: transform not unimodular")
    return inv


def _inner(G: Matrix, u: tuple, v: tuple) -> Fraction:
    Gv = [sum(G.data[i][j] * v[j] for j in range(G.cols)) for i in range(G.rows)]
    return Fraction(sum(u[i] * Gv[i] for i in range(len(u))))


def _harmonic_projection(C: ChainComplex, degree: int, z: tuple) -> tuple:
    """Subtract the coboundary component of a cocycle in the given metric."""
    d_prev = C.d(degree - 1)
    if d_prev.cols == 0:
        return z
    G = C.gram_at(degree)
    zcol = Matrix.column(list(z))
    lhs = d_prev.transpose() @ G @ d_prev
    rhs = d_prev.transpose() @ G @ zcol
    a = solve_exact(lhs, rhs)
    h = zcol - d_prev @ a
    return h.col(0)


# ---------------------------------------------------------------------
# Laplacians, analytic torsion, zeta values
# ---------------------------------------------------------------------


def adjoint(C: ChainComplex, degree: int) -> Matrix:
    """Adjoint of d_degree with respect to the Gram matrices."""
    d = C.d(degree)
    G_here = C.gram_at(degree)
    G_next = C.gram_at(degree + 1)
    from .matrices import inverse

    if G_here.rows == 0:
        return Matrix.zeros(d.cols, d.rows)
    return inverse(G_here) @ d.transpose() @ G_next


def laplacian(C: ChainComplex, degree: int) -> Matrix:
    """Delta_j = d_{j-1} d*_{j-1} + d*_j d_j (gram-self-adjoint, PSD)."""
    n = C.rank_at(degree)
    out = Matrix.zeros(n, n)
    d_prev = C.d(degree - 1)
    if d_prev.cols > 0 and n > 0:
        out = out + d_prev @ adjoint(C, degree - 1)
    d_here = C.d(degree)
    if d_here.rows > 0 and n > 0:
        out = out + adjoint(C, degree) @ d_here
    return out


def laplacian_pseudo_det(C: ChainComplex, degree: int) -> Fraction:
    """Exact product of the nonzero Laplacian eigenvalues at one degree."""
    n = C.rank_at(degree)
    if n == 0:
        return Fraction(1)
    delta = laplacian(C, degree)
    G = C.gram_at(degree)
    return Fraction(pdet_on_invariant_subspace(delta, G, Matrix.identity(n)))


def analytic_torsion(
    C: ChainComplex, factor_bound: int = DEFAULT_FACTOR_BOUND
) -> TorsionValue:
    """log tau(C) = (1/2) sum_j (-1)^j j log pdet(Delta_j), exactly.

    The scaling is calibrated so that for a rationally acyclic complex
    with unit-covolume lattices, log tau equals the alternating sum of
    the log torsion-cohomology orders.
    """
    if C.gram is None:
        raise ComplexError("analytic torsion requires a metric on every degree")
    require_valid(C)
    out = TorsionValue.one()
    for deg in C.degrees:
        pdet = laplacian_pseudo_det(C, deg)
        if pdet != 1 and deg != 0:
            out = out * TorsionValue.from_rational(pdet, factor_bound) ** Fraction(
                _sign(deg) * deg, 2
            )
    return out


def zeta_at_zero(C: ChainComplex) -> int:
    """Z(0) = sum_j (-1)^j j rank(Delta_j)."""
    if C.gram is None:
        raise ComplexError("zeta values require a metric")
    require_valid(C)
    total = 0
    for deg in C.degrees:
        total += _sign(deg) * deg * rank(laplacian(C, deg))
    return total


def zeta_derivative_at_zero(
    C: ChainComplex, factor_bound: int = DEFAULT_FACTOR_BOUND
) -> TorsionValue:
    """exp(Z'(0)) as an exact TorsionValue; Z'(0) = -2 log tau(C)."""
    return analytic_torsion(C, factor_bound) ** Fraction(-2)


def lattice_covolume_squares(C: ChainComplex) -> dict[int, Fraction]:
    """Per-degree squared covolume det(gram)."""
    if C.gram is None:
        raise ComplexError("complex carries no metric")
    return {deg: Fraction(det_exact(C.gram[C.index(deg)])) for deg in C.degrees}


def torsion_cohomology_value(C: ChainComplex) -> TorsionValue:
    """exp(sum_i (-1)^i log |H^i(C)_tors|) as an exact TorsionValue."""
    rep = cohomology(C, with_regulators=False)
    out = TorsionValue.one()
    for entry in rep.by_degree:
        if entry.torsion_order != 1:
            out = out * TorsionValue.from_integer(entry.torsion_order) ** _sign(
                entry.degree
            )
    return out


def is_rationally_acyclic(C: ChainComplex) -> bool:
    for deg in C.degrees:
        if rank(C.d(deg - 1)) + rank(C.d(deg)) != C.rank_at(deg):
            return False
    return True


# ---------------------------------------------------------------------
# Reidemeister torsion through volume forms
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class VolumeForm:
    """A top exterior form given by an ordered basis and a scalar.

    The form assigns ``scale`` to the wedge of the listed basis columns.
    """

    basis: Matrix
    scale: Fraction = Fraction(1)


def rt_volume_forms(
    C: ChainComplex,
    omega: dict[int, VolumeForm],
    mu: dict[int, VolumeForm] | None = None,
    rng=None,
) -> Fraction:
    """Reidemeister torsion of a rational complex from volume form data.

    omega gives a volume form per degree of the complex; mu gives one per
    degree with nonvanishing rational cohomology (listing cocycle
    representatives of a basis of H^i).  Returns the alternating product
    prod m_i^((-1)^i), a nonzero rational.  Its absolute value does not
    depend on the auxiliary choices made here (complements, lifts); the
    sign depends on basis orderings and is reported as computed.

    rng, when given, randomizes the auxiliary choices; used to exercise
    the choice-independence property.
    """
    require_valid(C)
    mu = dict(mu or {})
    result = Fraction(1)
    # per-degree data: kernel, image pre-basis, cohomology reps
    complements: dict[int, Matrix] = {}
    for deg in C.degrees:
        d_here = C.d(deg)
        piv = pivot_columns(d_here) if d_here.rows else []
        n = C.rank_at(deg)
        if rng is not None and n:
            # random complement of the kernel that still maps to a basis:
            # shifting the preimage columns by kernel vectors changes
            # nothing visible to the torsion
            base = Matrix.identity(n).submatrix(range(n), piv)
            K = saturated_kernel_rational(d_here)
            if K.cols and base.cols:
                R = Matrix(
                    K.cols,
                    base.cols,
                    [
                        [rng.randint(-2, 2) for _ in range(base.cols)]
                        for _ in range(K.cols)
                    ],
                )
                base = base + K @ R
            complements[deg] = base
        else:
            complements[deg] = Matrix.identity(n).submatrix(range(n), piv)

    for deg in C.degrees:
        n = C.rank_at(deg)
        if deg not in omega:
            raise ComplexError(f"missing volume form at degree {deg}")
        w = omega[deg]
        if w.basis.shape != (n, n):
            raise ComplexError(f"volume form basis at degree {deg} has wrong shape")
        if w.scale == 0 or det_exact(w.basis) == 0:
            raise ComplexError(f"degenerate volume form at degree {deg}")

        d_prev = C.d(deg - 1)
        image_part = d_prev @ complements.get(deg - 1, Matrix.zeros(d_prev.cols, 0))
        u_part = complements[deg]

        h_dim = n - image_part.cols - u_part.cols
        if h_dim < 0:
            raise ComplexError("internal error: dimension bookkeeping")
        if h_dim > 0:
            if deg not in mu:
                raise ComplexError(
                    f"cohomology volume form required at degree {deg} (H^{deg} != 0)"
                )
            m_form = mu.pop(deg)
            reps = m_form.basis
            if reps.shape != (n, h_dim):
                raise ComplexError(
                    f"cohomology volume form at degree {deg} must list {h_dim} cocycles"
                )
            d_here = C.d(deg)
            if not (d_here @ reps).is_zero():
                raise ComplexError(f"cohomology representatives at degree {deg} are not cocycles")
            if rng is not None and image_part.cols:
                shift = Matrix(
                    image_part.cols,
                    reps.cols,
                    [
                        [rng.randint(-2, 2) for _ in range(reps.cols)]
                        for _ in range(image_part.cols)
                    ],
                )
                reps = reps + image_part @ shift
            mu_scale = m_form.scale
            if mu_scale == 0:
                raise ComplexError(f"degenerate cohomology volume form at degree {deg}")
        else:
            reps = Matrix.zeros(n, 0)
            mu_scale = Fraction(1)

        stacked = image_part.hstack(u_part).hstack(reps)
        if stacked.shape != (n, n):
            raise ComplexError("internal error: assembled basis is not square")
        coords = solve_exact(w.basis, stacked)
        det = det_exact(coords)
        if det == 0:
            raise ComplexError(
                f"assembled basis is degenerate at degree {deg} "
                "(degenerate forms or dependent representatives)"
            )
        m_i = Fraction(mu_scale) / (Fraction(w.scale) * Fraction(det))
        result *= m_i if _sign(deg) == 1 else Fraction(1) / m_i
    if mu:
        extra = sorted(mu)
        raise ComplexError(
            f"cohomology volume forms supplied at acyclic degrees {extra}"
        )
    return result


def saturated_kernel_rational(M: Matrix) -> Matrix:
    """Kernel basis over Q (columns); integral input not required."""
    from .matrices import nullspace

    return nullspace(M)


def standard_volume_forms(C: ChainComplex) -> dict[int, VolumeForm]:
    """Integral volume forms: value 1 on the standard lattice basis."""
    return {deg: VolumeForm(Matrix.identity(C.rank_at(deg))) for deg in C.degrees}
