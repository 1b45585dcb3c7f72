"""Cyclic-order-p symmetry of complexes: isotypic pieces and twisted torsion.

For an order-p action s on a complex A, the two rational isotypic pieces
are the saturated sublattices A[s - 1] = ker(s - 1) and A[P(s)] = ker(P(s))
with P(x) = x^(p-1) + ... + 1.  Their Q-spans are complementary and, when
the action is isometric, orthogonal.  The finite quotient
A' = A / (A[s-1] + A[P(s)]) is a p-group in every degree.

Twisted analytic torsion follows the spectral convention
    log tau_s := (1/2) sum_j (-1)^j j sum_l tr(s | E_{l,j}) log l
over the nonzero Laplacian eigenvalues l.  For p = 2 this is exactly
log tau(A[s-1]) - log tau(A[s+1]) with the induced metrics, which is the
exact code path; a high precision numeric path covers every p.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .complexes import (
    ChainComplex,
    ComplexError,
    GroupAction,
    analytic_torsion,
    cohomology,
    is_rationally_acyclic,
    laplacian,
    require_valid,
    _sign,
)
from .matrices import (
    Matrix,
    det_exact,
    hermite_row_basis,
    lattice_column_basis,
    pdet_on_invariant_subspace,
    rank,
    saturated_kernel,
    smith_normal_form,
    solve_integer,
)
from .torsionvalue import DEFAULT_FACTOR_BOUND, TorsionValue


class ActionError(ComplexError):
    pass


def _require_action(C: ChainComplex) -> GroupAction:
    if C.action is None:
        raise ActionError("complex carries no group action")
    return C.action


def cyclotomic_value(s: Matrix, p: int) -> Matrix:
    """P(s) = s^(p-1) + ... + s + 1."""
    n = s.rows
    out = Matrix.identity(n)
    power = Matrix.identity(n)
    for _ in range(p - 1):
        power = power @ s
        out = out + power
    return out


@dataclass(frozen=True)
class IsotypicDecomposition:
    fixed_part: ChainComplex
    pofsigma_part: ChainComplex
    fixed_embeddings: tuple[Matrix, ...]
    pofsigma_embeddings: tuple[Matrix, ...]


@functools.lru_cache(maxsize=256)
def isotypic_decomposition(C: ChainComplex) -> IsotypicDecomposition:
    """Saturated fixed and P(s)-killed sublattices with induced structure."""
    action = _require_action(C)
    require_valid(C)
    p = action.order
    fixed_emb: list[Matrix] = []
    pof_emb: list[Matrix] = []
    for i, r in enumerate(C.ranks):
        s = action.matrices[i]
        fixed_emb.append(saturated_kernel(s - Matrix.identity(r)))
        pof_emb.append(saturated_kernel(cyclotomic_value(s, p)))
        if fixed_emb[-1].cols + pof_emb[-1].cols != r:
            raise ActionError(
                "isotypic Q-spans are not complementary "
                f"(degree {C.min_degree + i}); is the action order really {p}?"
            )
    fixed = _induced_subcomplex(C, fixed_emb)
    pof = _induced_subcomplex(C, pof_emb)
    return IsotypicDecomposition(
        fixed_part=fixed,
        pofsigma_part=pof,
        fixed_embeddings=tuple(fixed_emb),
        pofsigma_embeddings=tuple(pof_emb),
    )


def _induced_subcomplex(C: ChainComplex, embeddings: list[Matrix]) -> ChainComplex:
    """Restrict differentials and gram to d-stable saturated sublattices."""
    ranks = tuple(E.cols for E in embeddings)
    diffs = []
    for i in range(len(ranks) - 1):
        image = C.differentials[i] @ embeddings[i]
        if embeddings[i + 1].cols == 0:
            if not image.is_zero():
                raise ActionError("sublattices are not differential-stable")
            diffs.append(Matrix.zeros(0, ranks[i]))
        else:
            diffs.append(solve_integer(embeddings[i + 1], image))
    gram = None
    if C.gram is not None:
        gram = tuple(
            embeddings[i].transpose() @ C.gram[i] @ embeddings[i]
            for i in range(len(ranks))
        )
    return ChainComplex(C.min_degree, ranks, tuple(diffs), gram, None)


# ---------------------------------------------------------------------
# finite quotient complex A'
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteComplex:
    """A complex of finite abelian groups presented as Z^n / lattice."""

    min_degree: int
    ambient_ranks: tuple[int, ...]
    relation_bases: tuple[Matrix, ...]  # full-rank column bases of the relations
    group_divisors: tuple[tuple[int, ...], ...]
    induced_differentials: tuple[Matrix, ...]
    cohomology_divisors: tuple[tuple[int, ...], ...]

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.min_degree + len(self.ambient_ranks))

    def group_order(self, degree: int) -> int:
        idx = degree - self.min_degree
        if not 0 <= idx < len(self.group_divisors):
            return 1
        out = 1
        for d in self.group_divisors[idx]:
            out *= d
        return out

    def cohomology_order(self, degree: int) -> int:
        idx = degree - self.min_degree
        if not 0 <= idx < len(self.cohomology_divisors):
            return 1
        out = 1
        for d in self.cohomology_divisors[idx]:
            out *= d
        return out


@functools.lru_cache(maxsize=256)
def quotient_cohomology(C: ChainComplex) -> FiniteComplex:
    """A'_i = A_i / (A_i[s-1] + A_i[P(s)]) and the cohomology of A'.

    Group structure per degree from the Smith form of the stacked
    embedding matrices; cohomology by lifting everything to integer
    lattices: H^i(A') = K_i / D_i with
    K_i = preimage of the relations under d_i and D_i generated by the
    relations together with d_{i-1}.
    """
    action = _require_action(C)
    require_valid(C)
    p = action.order
    dec = isotypic_decomposition(C)
    n_deg = len(C.ranks)

    relation_bases: list[Matrix] = []
    group_divs: list[tuple[int, ...]] = []
    for i in range(n_deg):
        stacked = dec.fixed_embeddings[i].hstack(dec.pofsigma_embeddings[i])
        basis = lattice_column_basis(stacked)
        if basis.cols != C.ranks[i]:
            raise ActionError("relation lattice is not full rank")
        relation_bases.append(basis)
        snf = smith_normal_form(basis)
        divs = tuple(d for d in snf.divisors if d > 1)
        for d in divs:
            if not _is_power_of(d, p):
                raise ActionError(
                    f"quotient group has a divisor {d} that is not a power of {p}"
                )
        group_divs.append(divs)

    induced = []
    for i in range(n_deg - 1):
        induced.append(C.differentials[i])

    coh_divs: list[tuple[int, ...]] = []
    for i in range(n_deg):
        n = C.ranks[i]
        if n == 0:
            coh_divs.append(())
            continue
        # K_i = {x : d x lies in the relation lattice one degree up}
        if i + 1 < n_deg and C.ranks[i + 1] > 0:
            stacked = C.differentials[i].hstack(relation_bases[i + 1].scale(-1))
            ker = saturated_kernel(stacked)
            proj = ker.submatrix(range(n), range(ker.cols))
            K = lattice_column_basis(proj)
        else:
            K = Matrix.identity(n)
        if K.cols != n:
            raise ActionError("internal error: cocycle preimage lattice not full rank")
        gens = relation_bases[i]
        if i > 0 and C.ranks[i - 1] > 0:
            gens = gens.hstack(C.differentials[i - 1])
        D = lattice_column_basis(gens)
        coords = solve_integer(K, D)
        snf = smith_normal_form(coords)
        if snf.rank != n:
            raise ActionError("internal error: boundary lattice not full rank")
        coh_divs.append(tuple(d for d in snf.divisors if d > 1))

    return FiniteComplex(
        min_degree=C.min_degree,
        ambient_ranks=tuple(C.ranks),
        relation_bases=tuple(relation_bases),
        group_divisors=tuple(group_divs),
        induced_differentials=tuple(induced),
        cohomology_divisors=tuple(coh_divs),
    )


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


# ---------------------------------------------------------------------
# naive equivariant Reidemeister torsion
# ---------------------------------------------------------------------


def _require_q_acyclic(C: ChainComplex, what: str) -> None:
    if not is_rationally_acyclic(C):
        raise ComplexError(f"{what} requires a rationally acyclic complex")


def isotypic_cohomology_bracket(C: ChainComplex) -> TorsionValue:
    """exp of sum_i (-1)^i [log|H^i(A[s-1])| - (1/(p-1)) log|H^i(A[P(s)])|]."""
    action = _require_action(C)
    p = action.order
    dec = isotypic_decomposition(C)
    fixed_rep = cohomology(dec.fixed_part, with_regulators=False)
    pof_rep = cohomology(dec.pofsigma_part, with_regulators=False)
    out = TorsionValue.one()
    for entry in fixed_rep.by_degree:
        if entry.free_rank:
            raise ComplexError("fixed part is not rationally acyclic")
        if entry.torsion_order != 1:
            out = out * TorsionValue.from_integer(entry.torsion_order) ** _sign(
                entry.degree
            )
    for entry in pof_rep.by_degree:
        if entry.free_rank:
            raise ComplexError("cyclotomic part is not rationally acyclic")
        if entry.torsion_order != 1:
            out = out * TorsionValue.from_integer(entry.torsion_order) ** Fraction(
                -_sign(entry.degree), p - 1
            )
    return out


def quotient_cohomology_value(C: ChainComplex) -> TorsionValue:
    """exp of sum_i (-1)^i log |H^i(A')|."""
    fin = quotient_cohomology(C)
    out = TorsionValue.one()
    for deg in fin.degrees:
        order = fin.cohomology_order(deg)
        if order != 1:
            out = out * TorsionValue.from_integer(order) ** _sign(deg)
    return out


def nrt_sigma(C: ChainComplex) -> TorsionValue:
    """Naive equivariant Reidemeister torsion (purely homological).

    log NRT = sum_i (-1)^i [ log|H^i(A[s-1])| - (1/(p-1)) log|H^i(A[P(s)])| ]
            + sum_i (-1)^i log|H^i(A')|.
    Exponents may have denominator p - 1.
    """
    _require_action(C)
    _require_q_acyclic(C, "naive equivariant torsion")
    return isotypic_cohomology_bracket(C) * quotient_cohomology_value(C)


# ---------------------------------------------------------------------
# twisted analytic torsion
# ---------------------------------------------------------------------


def tau_sigma_exact_p2(
    C: ChainComplex, factor_bound: int = DEFAULT_FACTOR_BOUND
) -> TorsionValue:
    """Exact twisted analytic torsion for an involution (p = 2).

    Equals log tau(A[s-1], induced gram) - log tau(A[s+1], induced gram),
    which is the spectral quantity
    (1/2) sum_j (-1)^j j sum_l tr(s|E_{l,j}) log l because the two
    isotypic families split every Laplacian eigenspace.
    """
    action = _require_action(C)
    if action.order != 2:
        raise ActionError(
            "exact twisted torsion is implemented for p = 2 only; "
            "use tau_sigma_numeric for other orders"
        )
    if C.gram is None:
        raise ComplexError("twisted analytic torsion requires a metric")
    dec = isotypic_decomposition(C)
    plus = analytic_torsion(dec.fixed_part, factor_bound)
    minus = analytic_torsion(dec.pofsigma_part, factor_bound)
    return plus / minus


def twisted_zeta_derivative_at_zero(
    C: ChainComplex, factor_bound: int = DEFAULT_FACTOR_BOUND
) -> TorsionValue:
    """exp(Z'_s(0)) exactly, for p in {2, 3}.

    Z_s(s) = sum_j (-1)^j j sum_l tr(s|E_l) l^(-s).  Traces decompose as
    dim(E_l ∩ V_1) - (1/(p-1)) dim(E_l ∩ V_P) because the primitive
    character multiplicities inside a real eigenspace pair up under
    complex conjugation; for p in {2, 3} this pairing is forced, so the
    twisted zeta reduces to pseudo-determinants of restricted Laplacians.
    """
    action = _require_action(C)
    p = action.order
    if p not in (2, 3):
        raise ActionError("exact twisted zeta requires p in {2, 3}")
    if C.gram is None:
        raise ComplexError("twisted zeta requires a metric")
    dec = isotypic_decomposition(C)
    tau_fixed = analytic_torsion(dec.fixed_part, factor_bound)
    tau_pof = analytic_torsion(dec.pofsigma_part, factor_bound)
    combo = tau_fixed / tau_pof ** Fraction(1, p - 1)
    return combo ** Fraction(-2)


def ambient_restricted_spectral_value(
    C: ChainComplex, factor_bound: int = DEFAULT_FACTOR_BOUND
) -> TorsionValue:
    """Same spectral quantity as tau_sigma, computed on the ambient side.

    Restricts each ambient Laplacian to the embedded isotypic subspaces
    (never forming the induced subcomplexes), so it provides a second,
    independent route to (1/2) sum (-1)^j j [log pdet - (1/(p-1)) log pdet].
    """
    action = _require_action(C)
    p = action.order
    if C.gram is None:
        raise ComplexError("spectral restriction requires a metric")
    dec = isotypic_decomposition(C)
    out = TorsionValue.one()
    for deg in C.degrees:
        i = C.index(deg)
        w = Fraction(_sign(deg) * deg, 2)
        if C.ranks[i] == 0 or w == 0:
            continue
        delta = laplacian(C, deg)
        G = C.gram[i]
        pd_fix = pdet_on_invariant_subspace(delta, G, dec.fixed_embeddings[i])
        pd_pof = pdet_on_invariant_subspace(delta, G, dec.pofsigma_embeddings[i])
        if pd_fix != 1:
            out = out * TorsionValue.from_rational(pd_fix, factor_bound) ** w
        if pd_pof != 1:
            out = out * TorsionValue.from_rational(pd_pof, factor_bound) ** (
                -w / (p - 1)
            )
    return out


# ---------------------------------------------------------------------
# numeric twisted analytic torsion (any prime order)
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class NumericValue:
    value: float
    error_bound: float
    precision_bits: int

    def agrees_with(self, other: float, slack: float = 0.0) -> bool:
        return abs(self.value - other) <= self.error_bound + slack


def tau_sigma_numeric(C: ChainComplex, precision: int = 128) -> NumericValue:
    """log tau_s = (1/2) sum_j (-1)^j j sum_l tr(s|E_l) log l, numerically.

    Eigenvalues are computed with mpmath at the requested precision after
    an exact symmetrization through the Cholesky factor of the Gram
    matrix.  The number of zero modes per degree is pinned by the exact
    rank of the Laplacian, so no thresholding against zero is needed.
    Clusters of nonzero eigenvalues closer than the separation threshold
    widen the reported error bound instead of failing silently.
    """
    action = _require_action(C)
    if C.gram is None:
        raise ComplexError("twisted analytic torsion requires a metric")
    require_valid(C)
    with mpmath.workprec(precision + 48):
        total = mpmath.mpf(0)
        bound = mpmath.mpf(0)
        eps = mpmath.mpf(2) ** (-(precision + 16))
        for deg in C.degrees:
            i = C.index(deg)
            n = C.ranks[i]
            weight = Fraction(_sign(deg) * deg, 2)
            if n == 0 or weight == 0:
                continue
            delta = laplacian(C, deg)
            r = rank(delta)
            if r == 0:
                continue
            G = C.gram[i]
            Gm = mpmath.matrix([[mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
                                 if isinstance(x, Fraction) else mpmath.mpf(x)
                                 for x in row] for row in G.data])
            Dm = mpmath.matrix([[mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
                                 if isinstance(x, Fraction) else mpmath.mpf(x)
                                 for x in row] for row in delta.data])
            Sm = mpmath.matrix([[mpmath.mpf(x) for x in row]
                                for row in action.matrices[i].data])
            L = mpmath.cholesky(Gm)
            Lt = L.T
            Lt_inv = mpmath.inverse(Lt)
            B = Lt * Dm * Lt_inv
            Bs = (B + B.T) / 2
            Stil = Lt * Sm * Lt_inv
            E, Q = mpmath.eigsy(Bs)
            evals = [E[k] for k in range(n)]
            order = sorted(range(n), key=lambda k: evals[k])
            nonzero = order[n - r:]
            scale = max(abs(evals[k]) for k in range(n)) + mpmath.mpf(1)
            lam_err = eps * scale * n
            # cluster the nonzero eigenvalues
            clusters: list[list[int]] = []
            for k in nonzero:
                if clusters and abs(evals[k] - evals[clusters[-1][-1]]) <= (
                    mpmath.mpf("1e-12") * scale
                ):
                    clusters[-1].append(k)
                else:
                    clusters.append([k])
            for cluster in clusters:
                lam_min = min(evals[k] for k in cluster)
                lam_max = max(evals[k] for k in cluster)
                if lam_min <= lam_err:
                    raise ActionError(
                        "nonzero eigenvalue indistinguishable from zero at the "
                        "requested precision; raise the precision"
                    )
                tr = mpmath.mpf(0)
                for k in cluster:
                    qk = mpmath.matrix([Q[j, k] for j in range(n)])
                    tr += sum(qk[j] * sum(Stil[j, m] * qk[m] for m in range(n))
                              for j in range(n))
                lam = (lam_min + lam_max) / 2
                contrib = mpmath.mpf(weight.numerator) / weight.denominator * tr * mpmath.log(lam)
                total += contrib
                spread = (lam_max - lam_min) / lam_min + lam_err / lam_min
                bound += abs(mpmath.mpf(weight.numerator) / weight.denominator) * (
                    abs(tr) + len(cluster) * eps * n
                ) * spread + abs(
                    mpmath.mpf(weight.numerator) / weight.denominator
                ) * len(cluster) * eps * n * abs(mpmath.log(lam))
        bound += eps
        return NumericValue(
            value=float(total),
            error_bound=float(bound),
            precision_bits=precision,
        )


# ---------------------------------------------------------------------
# twisted Reidemeister torsion
# ---------------------------------------------------------------------


def rt_sigma(C: ChainComplex, factor_bound: int = DEFAULT_FACTOR_BOUND) -> TorsionValue:
    """Twisted Reidemeister torsion of a metrized rationally acyclic complex.

    log RT_s = (1/2) log RT(A[s-1]) - (1/(2(p-1))) log RT(A[P(s)]), where
    the torsion of each acyclic isotypic piece is taken with its metric
    volume forms and therefore equals the analytic torsion of the piece
    with the induced gram.  Exact; exponents may be half-integral.
    """
    action = _require_action(C)
    if C.gram is None:
        raise ComplexError("twisted Reidemeister torsion requires a metric")
    _require_q_acyclic(C, "twisted Reidemeister torsion")
    p = action.order
    dec = isotypic_decomposition(C)
    tau_fixed = analytic_torsion(dec.fixed_part, factor_bound)
    tau_pof = analytic_torsion(dec.pofsigma_part, factor_bound)
    return tau_fixed ** Fraction(1, 2) / tau_pof ** Fraction(1, 2 * (p - 1))


def fixed_euler_characteristic(C: ChainComplex) -> int:
    dec = isotypic_decomposition(C)
    return sum(
        _sign(deg) * dec.fixed_part.rank_at(deg) for deg in dec.fixed_part.degrees
    )


# ---------------------------------------------------------------------
# two-primary bound from the long exact sequence
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralBoundData:
    """Both sides of the 2-primary estimate, in exact log-2 units."""

    at2_term: Fraction
    fixedpts_term: Fraction
    lhs: Fraction
    rhs: Fraction
    margin: Fraction
    cw_bound: Optional[tuple[Fraction, Fraction]] = None  # (lhs, rhs) of the D-factor bound

    @property
    def holds(self) -> bool:
        ok = self.margin >= 0
        if self.cw_bound is not None:
            ok = ok and self.cw_bound[0] <= self.cw_bound[1]
        return ok


def _two_primary_log(order: int) -> int:
    out = 0
    while order % 2 == 0:
        order //= 2
        out += 1
    return out


def mod_p_cohomology_log(C: ChainComplex, p: int) -> int:
    """sum_i dim_{F_p} H^i(C tensor F_p), i.e. log_p of the total order."""
    from .matrices import rank_mod

    total = 0
    for deg in C.degrees:
        r_in = rank_mod(C.d(deg - 1), p) if C.rank_at(deg - 1) else 0
        r_out = rank_mod(C.d(deg), p) if C.rank_at(deg + 1) else 0
        total += C.rank_at(deg) - r_in - r_out
    return total


def spectral_bound_data(
    C: ChainComplex, cw_top_degree: int | None = None
) -> SpectralBoundData:
    """Evaluate |at2| + |fixedpts| <= log|H*(A)[2^inf]| + 2 log|H*(A')|.

    All quantities are exact integers in log-2 units.  at2 is the
    alternating 2-primary contribution of the two isotypic pieces,
    fixedpts the alternating contribution of the quotient complex.

    When a cellular top degree D is supplied, the crude page-count bound
    log2|H*(A')| <= D * ( log2|H*(A ⊗ F2)| + log2|H*(A[s-1] ⊗ F2)| )
    is evaluated as well and reported through cw_bound.
    """
    action = _require_action(C)
    if action.order != 2:
        raise ActionError("the two-primary bound is stated for p = 2")
    _require_q_acyclic(C, "two-primary bound")
    dec = isotypic_decomposition(C)
    fixed_rep = cohomology(dec.fixed_part, with_regulators=False)
    pof_rep = cohomology(dec.pofsigma_part, with_regulators=False)
    fin = quotient_cohomology(C)
    amb_rep = cohomology(C.without_action(), with_regulators=False)

    at2 = Fraction(0)
    for entry in fixed_rep.by_degree:
        at2 -= _sign(entry.degree) * _two_primary_log(entry.torsion_order)
    for entry in pof_rep.by_degree:
        at2 += _sign(entry.degree) * _two_primary_log(entry.torsion_order)
    fixedpts = Fraction(0)
    for deg in fin.degrees:
        fixedpts -= _sign(deg) * _two_primary_log(fin.cohomology_order(deg))

    lhs = abs(at2) + abs(fixedpts)
    rhs = Fraction(0)
    for entry in amb_rep.by_degree:
        rhs += _two_primary_log(entry.torsion_order)
    for deg in fin.degrees:
        rhs += 2 * _two_primary_log(fin.cohomology_order(deg))

    cw_bound = None
    if cw_top_degree is not None:
        aprime_total = Fraction(
            sum(_two_primary_log(fin.cohomology_order(deg)) for deg in fin.degrees)
        )
        ambient_f2 = mod_p_cohomology_log(C.without_action(), 2)
        fixed_f2 = mod_p_cohomology_log(dec.fixed_part, 2)
        cw_bound = (aprime_total, Fraction(cw_top_degree * (ambient_f2 + fixed_f2)))

    return SpectralBoundData(
        at2_term=at2,
        fixedpts_term=fixedpts,
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        cw_bound=cw_bound,
    )
