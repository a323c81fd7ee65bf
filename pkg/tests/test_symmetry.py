import math

import numpy as np
import pytest

from qconv.matqi import random_density, symmetric_projector
from qconv.symmetry import (
    all_permutations,
    invariant_hermitian_basis,
    isotypic_bases,
    num_standard_tableaux,
    partitions,
    twirl,
)


@pytest.mark.parametrize("n, expected", [(3, [(3,), (2, 1), (1, 1, 1)]), (4, [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)])])
def test_partitions(n, expected):
    assert list(partitions(n)) == expected


@pytest.mark.parametrize("lam, f", [((3,), 1), ((2, 1), 2), ((2, 2), 2), ((3, 1), 3), ((3, 2), 5)])
def test_hook_length(lam, f):
    assert num_standard_tableaux(lam) == f


@pytest.mark.parametrize("d, n", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_isotypic_blocks_reconstruct_trace(d, n):
    x = twirl(random_density(d ** n, seed=d * n), d, n)
    total = 0.0
    for lam, f, w in isotypic_bases(d, n):
        total += f * np.trace(w.conj().T @ x @ w).real
        if lam == (n,):
            # the symmetric block has the dimension of the symmetric subspace
            assert w.shape[1] == math.comb(d + n - 1, n)
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("d, n", [(2, 2), (2, 3), (3, 2)])
def test_invariant_basis_spans_twirls(d, n):
    basis = invariant_hermitian_basis(d, n)
    for b in basis:
        assert np.allclose(b, b.conj().T)
        for p in all_permutations(d, n):
            assert np.allclose(p @ b @ p.T, b)
    x = twirl(random_density(d ** n, seed=1), d, n)
    a = np.array([b.reshape(-1) for b in basis]).T
    coef, *_ = np.linalg.lstsq(a, x.reshape(-1), rcond=None)
    assert np.allclose(a @ coef, x.reshape(-1), atol=1e-10)


def test_twirl_fixes_symmetric_projector():
    p, _ = symmetric_projector(2, 3)
    assert np.allclose(twirl(p, 2, 3), p)
