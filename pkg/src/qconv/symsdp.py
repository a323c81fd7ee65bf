"""Dual smooth min-entropy SDP on multiply swap-symmetric states.

For a symmetric channel with dilation ``W: G' -> E ⊗ E'`` and a test state
``ξ`` on ``G^n G'^n``, the state ``ψ = (1 ⊗ W)^{⊗n} ξ`` on ``G^n E^n E'^n``
is invariant under swapping ``E_i <-> E'_i`` on any subset of sites.  Any
feasible ``(r, s, X)`` with ``r ψ <= X ⊗ 1 + s 1``, ``Tr_{G^n} X <= 1``
certifies ``2^{-H_min^ε(G^n|E^n)} >= δ r - s`` with ``δ = 1 - ε^2``.

This module builds such states, checks candidates, averages them over the
symmetries of ``ψ`` and runs small searches whose results are stored as
JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import permutations

import numpy as np

from .entropies import hmin_smooth_bipartite, hmin_smooth_dual_value, smooth_hmin_purified_dual
from .matqi import DimensionError, check_dim, herm, permutation_matrix, permute_vector, ptrace, swap_operator

MAX_N = 3
MAX_E = 2
MAX_G = 3
SYM_TOL = 1e-8


class SymmetryError(ValueError):
    """Raised when an isometry or state lacks the required swap symmetry."""


@dataclass
class MultiSymmetricState:
    """Pure state on ``G^n E^n E'^n`` (sites ordered block by block)."""

    psi: np.ndarray
    n: int
    dG: int
    dE: int

    @property
    def dims(self) -> tuple[int, int, int]:
        """``(|G|^n, |E|^n, |E'|^n)``."""
        return self.dG ** self.n, self.dE ** self.n, self.dE ** self.n

    @property
    def site_dims(self) -> list[int]:
        return [self.dG] * self.n + [self.dE] * self.n + [self.dE] * self.n

    def swap_generator(self, i: int) -> np.ndarray:
        """``SWAP_{E_i E'_i}`` on the full space."""
        n = self.n
        perm = list(range(3 * n))
        perm[n + i], perm[2 * n + i] = perm[2 * n + i], perm[n + i]
        return permutation_matrix(self.site_dims, perm)

    def site_permutation(self, pi) -> np.ndarray:
        """Permutation ``π`` applied simultaneously to the G, E and E' sites."""
        n = self.n
        perm = [pi[k] for k in range(n)] + [n + pi[k] for k in range(n)] + [2 * n + pi[k] for k in range(n)]
        return permutation_matrix(self.site_dims, perm)

    def symmetry_residuals(self) -> list[float]:
        """``||S_i ψψ^dag S_i - ψψ^dag||`` for the ``n`` single-site generators."""
        out = []
        for i in range(self.n):
            v = self.swap_generator(i) @ self.psi
            # sqrt(1 - |<ψ|v>|^2), computed without cancellation
            out.append(float(np.linalg.norm(v - np.vdot(self.psi, v) * self.psi)))
        return out

    def marginal_ge(self) -> np.ndarray:
        dg, de, dep = self.dims
        return ptrace(np.outer(self.psi, self.psi.conj()), [dg, de, dep], [0, 1])

    def invariant_permutations(self, tol: float = SYM_TOL) -> list[tuple[int, ...]]:
        """Site permutations ``π`` with ``π ψ ψ^dag π^dag = ψ ψ^dag``."""
        out = []
        for pi in permutations(range(self.n)):
            v = permute_vector(self.psi, self.site_dims, self._perm_list(pi))
            if 1 - abs(np.vdot(self.psi, v)) ** 2 <= tol:
                out.append(pi)
        return out

    def _perm_list(self, pi):
        n = self.n
        return [pi[k] for k in range(n)] + [n + pi[k] for k in range(n)] + [2 * n + pi[k] for k in range(n)]


def build_multisymmetric(w: np.ndarray, xi: np.ndarray, n: int, dE: int | None = None,
                         tol: float = SYM_TOL) -> MultiSymmetricState:
    """``ψ = (1 ⊗ W)^{⊗n} ξ`` for ``ξ`` on ``G^n G'^n``.

    ``ξ`` may also be a state on a single ``G G'`` pair, in which case its
    ``n``-fold tensor power is used.
    """
    w = np.asarray(w, dtype=complex)
    dG = w.shape[1]
    if dE is None:
        dE = int(round(math.sqrt(w.shape[0])))
    if dE * dE != w.shape[0]:
        raise DimensionError("W must map into E ⊗ E'")
    if min(np.linalg.norm(swap_operator(dE) @ w - s * w, 2) for s in (1, -1)) > tol:
        raise SymmetryError("W is not swap symmetric")
    if n < 1 or n > MAX_N or dE > MAX_E or dG > MAX_G:
        raise DimensionError(f"search scope is n <= {MAX_N}, |E| <= {MAX_E}, |G| <= {MAX_G}")
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if xi.size == dG * dG and n > 1:
        # tensor power of a single pair, reordered to G^n G'^n
        pair = xi
        xi = pair
        for _ in range(n - 1):
            xi = np.kron(xi, pair)
        perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
        xi = permute_vector(xi, [dG] * (2 * n), perm)
    if xi.size != dG ** (2 * n):
        raise DimensionError("test state must live on G^n G'^n")
    xi = xi / np.linalg.norm(xi)
    check_dim(dG ** n * dE ** (2 * n))
    wn = w
    for _ in range(n - 1):
        wn = np.kron(wn, w)
    # (1 ⊗ W^{⊗n}) on G^n ⊗ G'^n; output order G^n (E_1 E'_1) ... (E_n E'_n)
    psi = (xi.reshape(dG ** n, dG ** n) @ wn.T).reshape(-1)
    perm = list(range(n)) + [n + 2 * k for k in range(n)] + [n + 2 * k + 1 for k in range(n)]
    psi = permute_vector(psi, [dG] * n + [dE] * (2 * n), perm)
    state = MultiSymmetricState(psi, n, dG, dE)
    worst = max(state.symmetry_residuals())
    if worst > tol:
        raise SymmetryError(f"state violates swap symmetry ({worst:.3e})")
    return state


@dataclass
class DualCandidate:
    r: float
    s: float
    X: np.ndarray

    def as_tuple(self):
        return self.r, self.s, self.X

    def to_dict(self) -> dict:
        x = np.asarray(self.X)
        return {"r": float(self.r), "s": float(self.s), "X_re": x.real.tolist(), "X_im": x.imag.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "DualCandidate":
        return cls(float(d["r"]), float(d["s"]), np.asarray(d["X_re"]) + 1j * np.asarray(d["X_im"]))


def zero_candidate(state: MultiSymmetricState) -> DualCandidate:
    dg, de, _ = state.dims
    return DualCandidate(0.0, 0.0, np.zeros((dg * de, dg * de), dtype=complex))


def dual_bound(state: MultiSymmetricState, delta: float, candidate: DualCandidate, tol: float = 1e-8):
    """``(feasible, δ r - s, residuals)`` for a candidate on ``state``."""
    return hmin_smooth_dual_value(state.psi, state.dims, delta, candidate.as_tuple(), tol)


def _ge_permutation(state: MultiSymmetricState, pi) -> np.ndarray:
    n = state.n
    perm = [pi[k] for k in range(n)] + [n + pi[k] for k in range(n)]
    return permutation_matrix([state.dG] * n + [state.dE] * n, perm)


def symmetry_reduce(candidate: DualCandidate, state: MultiSymmetricState, delta: float | None = None,
                    check: bool = True) -> DualCandidate:
    """Average ``X`` over the site permutations that leave ``ψ`` invariant.

    ``r`` and ``s`` are kept, so the objective is unchanged; feasibility is
    preserved because the constraints are convex and the group fixes ``ψ``.
    The ``E <-> E'`` swaps move ``X ⊗ 1`` out of that form, so they do not
    act on ``X``.
    """
    if check and delta is not None:
        ok, _, res = dual_bound(state, delta, candidate)
        if not ok:
            raise ValueError(f"candidate is infeasible: {res}")
    perms = state.invariant_permutations()
    x = np.zeros_like(np.asarray(candidate.X, dtype=complex))
    for pi in perms:
        p = _ge_permutation(state, pi)
        x += p @ candidate.X @ p.T
    return DualCandidate(candidate.r, candidate.s, herm(x / len(perms)))


def commutant_residual(candidate: DualCandidate, state: MultiSymmetricState) -> float:
    """Largest ``||[X, π]||`` over invariant adjacent transpositions of ``ψ``."""
    worst = 0.0
    for pi in state.invariant_permutations():
        p = _ge_permutation(state, pi)
        worst = max(worst, float(np.linalg.norm(p @ candidate.X - candidate.X @ p, 2)))
    return worst


# ---------------------------------------------------------------------------
# search harness
# ---------------------------------------------------------------------------


@dataclass
class SearchRecord:
    n: int
    eps: float
    delta: float
    primal: float  # 2^{-H_min^ε(G^n|E^n)}
    hmin: float
    dual_value: float
    reduced_value: float
    reduced_feasible: bool
    target: float  # 2^{-sqrt(n)}, recorded for comparison only
    candidate: dict = field(repr=False)

    def to_dict(self) -> dict:
        return asdict(self)


def primal_value(state: MultiSymmetricState, eps: float) -> tuple[float, float]:
    """``(2^{-H}, H)`` for ``H = H_min^ε(G^n|E^n)`` from the primal smooth SDP."""
    dg, de, _ = state.dims
    h = hmin_smooth_bipartite(state.marginal_ge(), dg, de, eps)
    return 2.0 ** (-h), h


def search(w: np.ndarray, xi: np.ndarray, ns=(1, 2), eps: float = 0.5) -> list[SearchRecord]:
    """Solve the dual at each ``n``, symmetry-reduce it and compare with the primal."""
    delta = 1 - eps ** 2
    out = []
    for n in ns:
        state = build_multisymmetric(w, xi, n)
        sol = smooth_hmin_purified_dual(state.psi, state.dims, delta)
        cand = DualCandidate(sol.r, sol.s, sol.X)
        red = symmetry_reduce(cand, state)
        ok, val, _ = dual_bound(state, delta, red, tol=1e-7)
        p, h = primal_value(state, eps)
        out.append(SearchRecord(n, eps, delta, p, h, sol.value, val, ok, 2.0 ** (-math.sqrt(n)), red.to_dict()))
    return out


def save_records(records, path: str) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_dict() for r in records], fh, indent=1)


def load_records(path: str) -> list[SearchRecord]:
    with open(path) as fh:
        return [SearchRecord(**d) for d in json.load(fh)]


def save_pool(candidates, path: str) -> None:
    with open(path, "w") as fh:
        json.dump([c.to_dict() for c in candidates], fh)


def load_pool(path: str) -> list[DualCandidate]:
    with open(path) as fh:
        return [DualCandidate.from_dict(d) for d in json.load(fh)]
