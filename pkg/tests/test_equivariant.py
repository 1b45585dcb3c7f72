import math
from fractions import Fraction

import pytest

from torsionkit.complexes import (
    ChainComplex,
    ComplexError,
    GroupAction,
    analytic_torsion,
    identity_gram,
    zeta_at_zero,
)
from torsionkit.constructions import (
    direct_sum,
    elementary_complex,
    tensor_power_cyclic,
)
from torsionkit.equivariant import (
    ActionError,
    ambient_restricted_spectral_value,
    isotypic_decomposition,
    nrt_sigma,
    quotient_cohomology,
    rt_sigma,
    spectral_bound_data,
    tau_sigma_exact_p2,
    tau_sigma_numeric,
    twisted_zeta_derivative_at_zero,
)
from torsionkit.generators import (
    random_equivariant_p2,
    random_equivariant_p3,
    rng_for,
)
from torsionkit.matrices import Matrix
from torsionkit.torsionvalue import TorsionValue


LOG2 = math.log(2)


def anchor_tensor_square():
    return tensor_power_cyclic(identity_gram(elementary_complex(2)), 2)


def swap_sum():
    A = identity_gram(elementary_complex(2))
    return direct_sum(A, A, swap=True)


def minus_involution():
    return identity_gram(elementary_complex(2)).with_action(
        GroupAction(order=2, matrices=(Matrix(1, 1, [[-1]]), Matrix(1, 1, [[-1]])))
    )


def one_degree_swap():
    return ChainComplex(
        0,
        (2,),
        (),
        (Matrix.identity(2),),
        GroupAction(order=2, matrices=(Matrix(2, 2, [[0, 1], [1, 0]]),)),
    )


def rotation_p3_complex():
    P = Matrix(3, 3, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    return ChainComplex(
        0,
        (3, 3),
        (P.scale(2),),
        (Matrix.identity(3), Matrix.identity(3)),
        GroupAction(order=3, matrices=(P, P)),
    )


class TestIsotypicDecomposition:
    def test_one_degree_swap(self):
        dec = isotypic_decomposition(one_degree_swap())
        assert dec.fixed_embeddings[0].to_lists() == [[1], [1]]
        assert dec.fixed_part.gram[0].to_lists() == [[2]]
        assert dec.pofsigma_embeddings[0].to_lists() == [[1], [-1]]
        assert dec.pofsigma_part.gram[0].to_lists() == [[2]]

    def test_trivial_action(self):
        C = identity_gram(elementary_complex(2)).with_action(
            GroupAction(order=3, matrices=(Matrix.identity(1), Matrix.identity(1)))
        )
        dec = isotypic_decomposition(C)
        assert dec.fixed_part.ranks == (1, 1)
        assert dec.pofsigma_part.ranks == (0, 0)

    def test_tensor_square_ranks(self):
        dec = isotypic_decomposition(anchor_tensor_square())
        assert dec.fixed_part.ranks == (1, 1, 0)
        assert dec.pofsigma_part.ranks == (0, 1, 1)

    def test_spans_complementary_and_stable(self):
        for seed in range(20):
            C = random_equivariant_p2(rng_for(11, "isotypic", seed))
            dec = isotypic_decomposition(C)
            for i, r in enumerate(C.ranks):
                assert dec.fixed_embeddings[i].cols + dec.pofsigma_embeddings[i].cols == r
                s = C.action.matrices[i]
                assert s @ dec.fixed_embeddings[i] == dec.fixed_embeddings[i]
                # the cyclotomic sublattice is stable (not pointwise fixed)
                img = s @ dec.pofsigma_embeddings[i]
                from torsionkit.matrices import solve_integer

                solve_integer(dec.pofsigma_embeddings[i], img)


class TestQuotientCohomology:
    def test_one_degree_swap(self):
        fin = quotient_cohomology(one_degree_swap())
        assert fin.group_order(0) == 2
        assert fin.cohomology_order(0) == 2

    def test_trivial_action(self):
        C = identity_gram(elementary_complex(2)).with_action(
            GroupAction(order=2, matrices=(Matrix.identity(1), Matrix.identity(1)))
        )
        fin = quotient_cohomology(C)
        assert all(fin.group_order(d) == 1 for d in fin.degrees)

    def test_tensor_square(self):
        fin = quotient_cohomology(anchor_tensor_square())
        assert [fin.group_order(d) for d in fin.degrees] == [1, 2, 1]
        assert [fin.cohomology_order(d) for d in fin.degrees] == [1, 2, 1]

    def test_rotation_p3(self):
        fin = quotient_cohomology(rotation_p3_complex())
        assert [fin.group_order(d) for d in fin.degrees] == [3, 3]
        assert [fin.cohomology_order(d) for d in fin.degrees] == [1, 1]

    def test_groups_are_p_groups(self):
        for seed in range(15):
            C = random_equivariant_p2(rng_for(12, "pgroup", seed), with_gram=False)
            fin = quotient_cohomology(C)
            for divs in fin.group_divisors:
                for d in divs:
                    while d % 2 == 0:
                        d //= 2
                    assert d == 1

    def test_chain_group_vs_cohomology_alternating_products(self):
        # for a finite complex the alternating product of the group orders
        # equals the alternating product of the cohomology orders
        for seed in range(15):
            C = random_equivariant_p2(rng_for(13, "altprod", seed), with_gram=False)
            fin = quotient_cohomology(C)
            lhs = Fraction(1)
            rhs = Fraction(1)
            for deg in fin.degrees:
                e = -1 if deg % 2 else 1
                lhs *= Fraction(fin.group_order(deg)) ** e
                rhs *= Fraction(fin.cohomology_order(deg)) ** e
            assert lhs == rhs


class TestNrtSigma:
    def test_tensor_square_anchor(self):
        assert nrt_sigma(anchor_tensor_square()).factor_map() == {2: Fraction(-4)}

    def test_swap_sum(self):
        assert nrt_sigma(swap_sum()).is_one()

    def test_rotation_p3(self):
        assert nrt_sigma(rotation_p3_complex()).is_one()

    def test_requires_acyclicity(self):
        C = one_degree_swap()
        with pytest.raises(ComplexError):
            nrt_sigma(C)


class TestTauSigma:
    def test_tensor_square_anchor(self):
        assert tau_sigma_exact_p2(anchor_tensor_square()).factor_map() == {
            2: Fraction(-3)
        }
        dec = isotypic_decomposition(anchor_tensor_square())
        assert analytic_torsion(dec.fixed_part).factor_map() == {2: Fraction(-3, 2)}
        assert analytic_torsion(dec.pofsigma_part).factor_map() == {2: Fraction(3, 2)}

    def test_swap_sum(self):
        assert tau_sigma_exact_p2(swap_sum()).is_one()

    def test_minus_involution(self):
        assert tau_sigma_exact_p2(minus_involution()).factor_map() == {2: Fraction(1)}

    def test_refuses_p3(self):
        with pytest.raises(ActionError, match="tau_sigma_numeric"):
            tau_sigma_exact_p2(rotation_p3_complex())

    def test_split_identity_random(self):
        for seed in range(20):
            C = random_equivariant_p2(rng_for(14, "split", seed))
            assert tau_sigma_exact_p2(C) == ambient_restricted_spectral_value(C)


class TestTauSigmaNumeric:
    def test_anchor(self):
        nv = tau_sigma_numeric(anchor_tensor_square())
        assert abs(nv.value - (-3 * LOG2)) < 1e-12
        assert nv.error_bound < 1e-12

    def test_p3_rotation(self):
        nv = tau_sigma_numeric(rotation_p3_complex())
        assert abs(nv.value) < 1e-9

    def test_identity_action_gives_untwisted(self):
        C = identity_gram(elementary_complex(2)).with_action(
            GroupAction(order=2, matrices=(Matrix.identity(1), Matrix.identity(1)))
        )
        nv = tau_sigma_numeric(C)
        assert abs(nv.value - analytic_torsion(C).log_value()) < 1e-12

    def test_exact_numeric_agreement_random(self):
        for seed in range(10):
            C = random_equivariant_p2(rng_for(15, "numeric", seed))
            nv = tau_sigma_numeric(C)
            exact = tau_sigma_exact_p2(C).log_value()
            assert abs(nv.value - exact) <= nv.error_bound + 1e-9

    def test_p3_exact_zeta_agreement(self):
        for seed in range(6):
            C = random_equivariant_p3(rng_for(16, "p3", seed))
            nv = tau_sigma_numeric(C)
            # Z'(0) = -2 log tau_sigma: the exact cyclotomic path must match
            zprime = twisted_zeta_derivative_at_zero(C).log_value()
            assert abs(-2 * nv.value - zprime) <= 2 * nv.error_bound + 1e-9


class TestRtSigma:
    def test_tensor_square_anchor(self):
        assert rt_sigma(anchor_tensor_square()).factor_map() == {2: Fraction(-3, 2)}

    def test_identity_action_halves_untwisted(self):
        C = identity_gram(elementary_complex(2)).with_action(
            GroupAction(order=2, matrices=(Matrix.identity(1), Matrix.identity(1)))
        )
        assert rt_sigma(C) == analytic_torsion(C) ** Fraction(1, 2)

    def test_swap_sum(self):
        assert rt_sigma(swap_sum()).is_one()

    def test_exact_for_p3(self):
        value = rt_sigma(rotation_p3_complex())
        assert value.is_exact


class TestSpectralBound:
    def test_anchor_margin_zero(self):
        data = spectral_bound_data(anchor_tensor_square())
        assert data.lhs == 4 and data.rhs == 4 and data.margin == 0
        assert data.holds

    def test_swap_sum_holds(self):
        assert spectral_bound_data(swap_sum()).holds

    def test_minus_involution_holds(self):
        data = spectral_bound_data(minus_involution())
        assert data.holds

    def test_random_inequality(self):
        for seed in range(25):
            C = random_equivariant_p2(rng_for(17, "bound", seed), with_gram=False)
            data = spectral_bound_data(C)
            assert data.margin >= 0
