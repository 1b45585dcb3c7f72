"""Seeded random complexes for the verification suites and tests.

Rational acyclicity is obtained by construction: random complexes are
assembled from two-term blocks Z --k--> Z and cones, then mixed by small
unimodular basis changes whose effect on differentials keeps d^2 = 0.
Every generator takes a random.Random instance, so suites are
reproducible from a seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .complexes import ChainComplex, GroupAction, identity_gram, validate
from .constructions import (
    OrderComplex,
    cone_on_identity,
    direct_sum,
    elementary_complex,
    equivariant_direct_sum,
    tensor_power_cyclic,
)
from .matrices import Matrix, block_diag, inverse


def rng_for(seed: int, label: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{label}:{index}")


def random_unimodular(rng: random.Random, n: int, shears: int = 2) -> Matrix:
    """Product of a signed permutation and a few unit shears."""
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        rows[i][j] = rng.choice((1, -1))
    T = Matrix(n, n, rows)
    for _ in range(shears):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        shear = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        shear[i][j] = rng.choice((1, -1))
        T = Matrix(n, n, shear) @ T
    return T


def conjugate_complex(
    C: ChainComplex,
    transforms: list[Matrix],
    transport_gram: bool = True,
) -> ChainComplex:
    """Change basis degreewise: d -> T d T^(-1), action and gram carried along.

    With transport_gram=False the gram (if any) is left untouched, which
    produces a genuinely different metrized complex; the action is only
    kept in that case when the transforms are orthogonal.
    """
    invs = [inverse(T) for T in transforms]
    diffs = []
    for i in range(len(C.ranks) - 1):
        d = transforms[i + 1] @ C.differentials[i] @ invs[i]
        if not d.is_integral():
            raise ValueError("transform is not unimodular")
        diffs.append(d)
    action = None
    if C.action is not None:
        mats = []
        for i in range(len(C.ranks)):
            s = transforms[i] @ C.action.matrices[i] @ invs[i]
            if not s.is_integral():
                raise ValueError("transform is not unimodular")
            mats.append(s)
        action = GroupAction(order=C.action.order, matrices=tuple(mats))
    gram = None
    if C.gram is not None:
        if transport_gram:
            gram = tuple(
                invs[i].transpose() @ C.gram[i] @ invs[i] for i in range(len(C.ranks))
            )
        else:
            gram = C.gram
    return ChainComplex(C.min_degree, C.ranks, tuple(diffs), gram, action)


def _entry_bound(C: ChainComplex) -> int:
    worst = 0
    for d in C.differentials:
        for row in d.data:
            for x in row:
                worst = max(worst, abs(x))
    return worst


def random_acyclic_complex(
    rng: random.Random,
    max_degrees: int = 4,
    max_total_rank: int = 6,
    entry_bound: int = 5,
    min_degree: int = 0,
    mix: bool = True,
) -> ChainComplex:
    """Rationally acyclic complex with identity gram and bounded entries."""
    for _ in range(64):
        span = rng.randint(2, max(2, max_degrees))
        blocks = []
        total = 0
        while total + 2 <= max_total_rank:
            k = rng.randint(1, entry_bound)
            deg = min_degree + rng.randint(0, span - 2)
            blocks.append(elementary_complex(k, deg))
            total += 2
            if rng.random() < 0.35 and blocks:
                break
        C = blocks[0]
        for b in blocks[1:]:
            C = direct_sum(C, b)
        if mix:
            T = [random_unimodular(rng, r, shears=rng.randint(0, 2)) for r in C.ranks]
            C = conjugate_complex(C, T, transport_gram=False)
        if _entry_bound(C) <= entry_bound:
            return identity_gram(C)
    # fall back to the unmixed version, always within bounds
    return identity_gram(blocks[0])


def random_small_complex(
    rng: random.Random,
    max_rank: int = 3,
    max_degrees: int = 3,
    entry_bound: int = 3,
) -> ChainComplex:
    """Random complex with d^2 = 0, not necessarily acyclic."""
    parts = []
    n_parts = rng.randint(1, 2)
    for _ in range(n_parts):
        kind = rng.random()
        deg = rng.randint(0, max_degrees - 2)
        if kind < 0.6:
            parts.append(elementary_complex(rng.randint(0, entry_bound), deg))
        else:
            r = rng.randint(1, max_rank)
            parts.append(
                ChainComplex(deg, (r,), (), None, None)
            )
    C = parts[0]
    for b in parts[1:]:
        C = direct_sum(C, b)
    T = [random_unimodular(rng, r, shears=1) for r in C.ranks]
    return identity_gram(conjugate_complex(C, T, transport_gram=False))


def random_gram(rng: random.Random, n: int, unimodular: bool = True) -> Matrix:
    T = random_unimodular(rng, n, shears=2)
    G = T.transpose() @ T
    if not unimodular:
        d = [rng.randint(1, 3) for _ in range(n)]
        D = Matrix(n, n, [[d[i] if i == j else 0 for j in range(n)] for i in range(n)])
        G = T.transpose() @ D @ T
    return G


def random_metrized_complex(
    rng: random.Random,
    max_degrees: int = 3,
    max_rank: int = 3,
    entry_bound: int = 3,
    unimodular: bool = False,
) -> ChainComplex:
    """Acyclic complex with a random exact positive definite gram."""
    C = random_acyclic_complex(
        rng, max_degrees=max_degrees, max_total_rank=2 * max_rank,
        entry_bound=entry_bound,
    )
    gram = tuple(random_gram(rng, r, unimodular=unimodular) for r in C.ranks)
    return C.with_gram(gram)


def _minus_identity_block(rng: random.Random, entry_bound: int) -> ChainComplex:
    """Elementary complex with the sign-flip involution."""
    k = rng.randint(1, entry_bound)
    C = identity_gram(elementary_complex(k, rng.randint(0, 1)))
    mats = tuple(Matrix.identity(r).scale(-1) for r in C.ranks)
    return C.with_action(GroupAction(order=2, matrices=mats))


def random_equivariant_p2(
    rng: random.Random,
    entry_bound: int = 3,
    with_gram: bool = True,
    allow_cone: bool = True,
) -> ChainComplex:
    """Rationally acyclic complex with an order-2 isometric action."""
    kind = rng.random()
    if kind < 0.4:
        A = random_acyclic_complex(
            rng, max_degrees=3, max_total_rank=4, entry_bound=entry_bound
        )
        C = tensor_power_cyclic(A, 2)
    elif kind < 0.75:
        A = random_acyclic_complex(
            rng, max_degrees=3, max_total_rank=6, entry_bound=entry_bound
        )
        C = direct_sum(A, A, swap=True)
    else:
        C = _minus_identity_block(rng, entry_bound)
        if rng.random() < 0.5:
            A = random_acyclic_complex(
                rng, max_degrees=2, max_total_rank=4, entry_bound=entry_bound
            )
            C = equivariant_direct_sum(C, direct_sum(A, A, swap=True))
    if allow_cone and rng.random() < 0.3:
        B = random_equivariant_p2(rng, entry_bound, with_gram=True, allow_cone=False)
        C = equivariant_direct_sum(C, cone_on_identity(B))
    if not with_gram:
        return ChainComplex(C.min_degree, C.ranks, C.differentials, None, C.action)
    return C


def random_equivariant_p3(
    rng: random.Random, entry_bound: int = 2, tensor_only: bool = False
) -> ChainComplex:
    """Rationally acyclic complex with an order-3 isometric action."""
    if tensor_only or rng.random() < 0.5:
        A = random_acyclic_complex(
            rng, max_degrees=2, max_total_rank=2, entry_bound=entry_bound
        )
        return tensor_power_cyclic(A, 3)
    A = random_acyclic_complex(
        rng, max_degrees=3, max_total_rank=4, entry_bound=entry_bound
    )
    return rotation_sum(A, 3)


def rotation_sum(A: ChainComplex, p: int) -> ChainComplex:
    """A^(+p) with the cyclic rotation of the summands (no signs)."""
    C = A
    for _ in range(p - 1):
        C = direct_sum(C, A)
    mats = []
    for deg in C.degrees:
        n = A.rank_at(deg)
        rows = [[0] * (n * p) for _ in range(n * p)]
        for blk in range(p):
            dst = (blk + 1) % p
            for i in range(n):
                rows[dst * n + i][blk * n + i] = 1
        mats.append(Matrix(n * p, n * p, rows))
    return C.with_action(GroupAction(order=p, matrices=tuple(mats)))


def random_order_complex(
    rng: random.Random, modulus: tuple[int, ...], max_rank: int = 2
) -> OrderComplex:
    """Two-term rationally acyclic complex over Z[x]/(modulus)."""
    m = len(modulus) - 1
    from .constructions import multiplication_matrix, restrict_scalars
    from .matrices import det_exact

    for _ in range(200):
        n = rng.randint(1, max_rank)
        dmat = tuple(
            tuple(
                tuple(rng.randint(-2, 2) for _ in range(m)) for _ in range(n)
            )
            for _ in range(n)
        )
        P = OrderComplex(
            modulus=modulus, min_degree=0, ranks=(n, n), differentials=(dmat,)
        )
        restricted = restrict_scalars(P)
        if det_exact(restricted.differentials[0]) != 0:
            return P
    raise RuntimeError("failed to sample an acyclic order complex")
