import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionkit.matrices import (
    LinalgError,
    Matrix,
    charpoly,
    det_exact,
    hermite_row_basis,
    inverse,
    pdet_on_invariant_subspace,
    pseudo_determinant,
    rank,
    rank_mod,
    saturated_kernel,
    smith_normal_form,
    solve_exact,
)

from oracles import minor_gcd_divisors, numeric_nonzero_eigen_product


small_int = st.integers(min_value=-5, max_value=5)


def int_matrix(rows, cols):
    return st.lists(
        st.lists(small_int, min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    ).map(lambda data: Matrix(rows, cols, data))


class TestSmithNormalForm:
    def test_worked_example(self):
        res = smith_normal_form(Matrix(2, 2, [[2, 4], [6, 8]]))
        assert res.divisors == (2, 4)

    def test_identity(self):
        assert smith_normal_form(Matrix.identity(3)).divisors == (1, 1, 1)

    def test_zero_matrix(self):
        res = smith_normal_form(Matrix(1, 1, [[0]]))
        assert res.divisors == (0,)
        assert res.rank == 0

    def test_rejects_rational(self):
        with pytest.raises(LinalgError):
            smith_normal_form(Matrix(1, 1, [[Fraction(1, 2)]]))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**6))
    def test_random_invariants(self, n, m, seed):
        rng = random.Random(seed)
        M = Matrix(n, m, [[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)])
        res = smith_normal_form(M)
        assert res.U @ M @ res.V == res.D
        assert abs(det_exact(res.U)) == 1
        assert abs(det_exact(res.V)) == 1
        nz = [d for d in res.divisors if d]
        assert all(d > 0 for d in nz)
        for a, b in zip(nz, nz[1:]):
            assert b % a == 0
        # divisor chain against the classical minor-gcd definition
        assert list(res.divisors)[: len(minor_gcd_divisors(M))] == minor_gcd_divisors(M)

    def test_deterministic(self):
        M = Matrix(3, 3, [[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        assert smith_normal_form(M).D == smith_normal_form(M).D


class TestSaturatedKernel:
    def test_sum_vector(self):
        K = saturated_kernel(Matrix(1, 2, [[1, 1]]))
        assert K.to_lists() == [[1], [-1]]

    def test_injective(self):
        assert saturated_kernel(Matrix.identity(2).scale(2)).cols == 0

    def test_saturation_removes_content(self):
        K = saturated_kernel(Matrix(1, 2, [[2, 2]]))
        assert K.to_lists() == [[1], [-1]]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 10**6))
    def test_kernel_properties(self, n, m, seed):
        rng = random.Random(seed)
        M = Matrix(n, m, [[rng.randint(-3, 3) for _ in range(m)] for _ in range(n)])
        K = saturated_kernel(M)
        assert (M @ K).is_zero()
        if K.cols:
            # a saturated sublattice has unit elementary divisors
            assert set(smith_normal_form(K).divisors) <= {1}
        assert K.cols == m - rank(M)


class TestPseudoDeterminant:
    def test_worked_examples(self):
        assert pseudo_determinant(Matrix(2, 2, [[2, -1], [-1, 2]])) == 3
        assert pseudo_determinant(Matrix(2, 2, [[1, -1], [-1, 1]])) == 2
        assert pseudo_determinant(Matrix.zeros(4, 4)) == 1

    def test_rejects_asymmetric(self):
        with pytest.raises(LinalgError):
            pseudo_determinant(Matrix(2, 2, [[1, 2], [0, 1]]))

    def test_rejects_indefinite(self):
        with pytest.raises(LinalgError):
            pseudo_determinant(Matrix(2, 2, [[0, 1], [1, 0]]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10**6))
    def test_matches_numeric_eigenproduct(self, n, seed):
        rng = random.Random(seed)
        G = Matrix(n, n, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        M = G.transpose() @ G
        exact = pseudo_determinant(M)
        approx = numeric_nonzero_eigen_product(M, rank(M))
        assert abs(float(exact) - approx) <= 1e-9 * max(1.0, abs(approx))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 5), st.integers(1, 5), st.integers(0, 10**6))
    def test_scaling_law(self, n, cnum, cden, seed):
        rng = random.Random(seed)
        G = Matrix(n, n, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        M = G.transpose() @ G
        c = Fraction(cnum, cden)
        r = rank(M)
        assert pseudo_determinant(M.scale(c * c)) == (c * c) ** r * pseudo_determinant(M)

    def test_invariant_subspace_route_agrees(self):
        rng = random.Random(11)
        for _ in range(25):
            n = rng.randint(1, 5)
            G = Matrix(n, n, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
            M = G.transpose() @ G
            fast = pdet_on_invariant_subspace(M, Matrix.identity(n), Matrix.identity(n))
            assert Fraction(fast) == Fraction(pseudo_determinant(M))


class TestCharpoly:
    def test_two_by_two(self):
        assert charpoly(Matrix(2, 2, [[2, -1], [-1, 2]])) == [1, -4, 3]

    def test_empty(self):
        assert charpoly(Matrix.identity(0)) == [1]

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 10**6))
    def test_cayley_hamilton(self, n, seed):
        rng = random.Random(seed)
        M = Matrix(n, n, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        coeffs = charpoly(M)
        acc = Matrix.zeros(n, n)
        power = Matrix.identity(n)
        for c in reversed(coeffs):
            acc = acc + power.scale(c)
            power = power @ M
        assert acc.is_zero()

    def test_determinant_consistency(self):
        rng = random.Random(7)
        for _ in range(20):
            n = rng.randint(1, 5)
            M = Matrix(n, n, [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])
            coeffs = charpoly(M)
            assert (-1) ** n * coeffs[-1] == det_exact(M)


class TestEliminationHelpers:
    def test_solve_and_inverse(self):
        A = Matrix(2, 2, [[2, 1], [1, 1]])
        X = solve_exact(A, Matrix.identity(2))
        assert A @ X == Matrix.identity(2)
        assert inverse(A) == X

    def test_solve_inconsistent(self):
        with pytest.raises(LinalgError):
            solve_exact(Matrix(2, 1, [[1], [1]]), Matrix(2, 1, [[1], [2]]))

    def test_hermite_canonical(self):
        a = hermite_row_basis(Matrix(2, 2, [[1, -1], [-1, 1]]))
        b = hermite_row_basis(Matrix(3, 2, [[-2, 2], [1, -1], [3, -3]]))
        assert a.to_lists() == [[1, -1]]
        assert b.to_lists() == [[1, -1]]

    def test_rank_mod(self):
        M = Matrix(2, 2, [[2, 0], [0, 3]])
        assert rank_mod(M, 2) == 1
        assert rank_mod(M, 3) == 1
        assert rank_mod(M, 5) == 2
