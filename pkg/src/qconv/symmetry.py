"""Permutation symmetry of n-fold tensor powers.

Operators on ``(C^d)^{⊗n}`` that commute with all site permutations are
block diagonal in the Schur-Weyl decomposition ``⊕_λ U_λ ⊗ S_λ``.  For each
partition ``λ`` we pick the row-reading standard tableau and find the joint
eigenspace of the Jucys-Murphy elements with that tableau's content
vector.  That subspace has dimension ``dim U_λ``; compressing any invariant
operator onto it gives its ``λ`` block, and ``Tr X = sum_λ f_λ Tr X_λ``
with ``f_λ`` the number of standard tableaux.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import permutations, product

import numpy as np

from .matqi import check_dim, permutation_matrix


def partitions(n: int, max_rows: int | None = None):
    """Partitions of ``n`` in decreasing lexicographic order."""

    def rec(n, largest):
        if n == 0:
            yield ()
            return
        for k in range(min(n, largest), 0, -1):
            for rest in rec(n - k, k):
                yield (k,) + rest

    for lam in rec(n, n):
        if max_rows is None or len(lam) <= max_rows:
            yield lam


def num_standard_tableaux(lam) -> int:
    """Hook length formula."""
    n = sum(lam)
    conj = [sum(1 for r in lam if r > j) for j in range(lam[0])] if lam else []
    hooks = 1
    for i, row in enumerate(lam):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks


def row_reading_contents(lam) -> list[int]:
    """Contents ``col - row`` of boxes 1..n in the row-reading tableau."""
    out = []
    for i, row in enumerate(lam):
        for j in range(row):
            out.append(j - i)
    return out


def transposition(d: int, n: int, a: int, b: int) -> np.ndarray:
    perm = list(range(n))
    perm[a], perm[b] = perm[b], perm[a]
    return permutation_matrix([d] * n, perm)


@lru_cache(maxsize=32)
def isotypic_bases(d: int, n: int) -> tuple:
    """``((λ, f_λ, W_λ), ...)`` with ``W_λ`` an orthonormal basis (columns).

    ``W_λ`` spans the Gelfand-Tsetlin subspace of the row-reading tableau;
    its column count is the multiplicity of ``λ``.
    """
    check_dim(d ** n)
    D = d ** n
    jm = []
    for k in range(1, n):
        x = np.zeros((D, D))
        for j in range(k):
            x += transposition(d, n, j, k)
        jm.append(x)
    out = []
    total = 0
    for lam in partitions(n, max_rows=d):
        c = row_reading_contents(lam)
        m = np.zeros((D, D))
        for k in range(1, n):
            y = jm[k - 1] - c[k] * np.eye(D)
            m += y @ y
        w, v = np.linalg.eigh(m)
        basis = v[:, w < 1e-8]
        f = num_standard_tableaux(lam)
        out.append((lam, f, basis))
        total += f * basis.shape[1]
    if total != D:
        raise RuntimeError(f"isotypic decomposition covers {total} of {D} dimensions")
    return tuple(out)


def all_permutations(d: int, n: int) -> list[np.ndarray]:
    return [permutation_matrix([d] * n, p) for p in permutations(range(n))]


def twirl(x: np.ndarray, d: int, n: int) -> np.ndarray:
    """Average of ``P x P^dag`` over all site permutations."""
    ps = all_permutations(d, n)
    return sum(p @ x @ p.T for p in ps) / len(ps)


def invariant_hermitian_basis(d: int, n: int) -> np.ndarray:
    """Real basis of permutation-invariant Hermitian operators on ``(C^d)^{⊗n}``.

    Built from orbit sums ``O`` of matrix units under simultaneous
    permutation of row and column indices: ``O`` itself when ``O^dag = O``,
    otherwise the pair ``O + O^dag`` and ``i(O - O^dag)``.
    """
    check_dim(d ** n)
    D = d ** n
    idx = np.arange(D).reshape([d] * n)
    seen = {}
    orbits = []
    for i, j in product(range(D), range(D)):
        if (i, j) in seen:
            continue
        ri = np.unravel_index(i, [d] * n)
        rj = np.unravel_index(j, [d] * n)
        orb = set()
        for p in permutations(range(n)):
            a = idx[tuple(ri[k] for k in p)]
            b = idx[tuple(rj[k] for k in p)]
            orb.add((int(a), int(b)))
        for e in orb:
            seen[e] = len(orbits)
        orbits.append(sorted(orb))
    mats = []
    done = set()
    for k, orb in enumerate(orbits):
        if k in done:
            continue
        o = np.zeros((D, D), dtype=complex)
        for a, b in orb:
            o[a, b] = 1
        kt = seen[(orb[0][1], orb[0][0])]
        if kt == k:
            mats.append(o)
        else:
            ot = o.T.copy()
            mats.append(o + ot)
            mats.append(1j * (o - ot))
            done.add(kt)
        done.add(k)
    return np.array(mats)
