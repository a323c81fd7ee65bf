"""Dense Hermitian linear algebra and multipartite state utilities.

Everything here works on plain ``numpy`` arrays; :class:`DensityOperator`
and :class:`PureState` are thin labelled wrappers used at module
boundaries.  Logarithms are base 2 throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HERM_TOL = 1e-9
EIG_CUTOFF = 1e-10
MAX_DIM = 4096


class DimensionError(ValueError):
    """Raised when shapes, labels or the dense dimension guard do not fit."""


class NotPositiveError(ValueError):
    """Raised when an operator that must be PSD has eigenvalues below tolerance."""


# ---------------------------------------------------------------------------
# labels and state carriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SystemLabel:
    name: str
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionError(f"system {self.name!r} must have dim >= 1, got {self.dim}")


def _as_labels(factors) -> tuple[SystemLabel, ...]:
    out = []
    for k, f in enumerate(factors):
        if isinstance(f, SystemLabel):
            out.append(f)
        elif isinstance(f, tuple):
            out.append(SystemLabel(str(f[0]), int(f[1])))
        else:
            out.append(SystemLabel(f"S{k}", int(f)))
    names = [f.name for f in out]
    if len(set(names)) != len(names):
        raise DimensionError(f"duplicate system names {names}")
    return tuple(out)


def check_dim(total: int) -> None:
    if total > MAX_DIM:
        raise DimensionError(f"total dimension {total} exceeds dense guard {MAX_DIM}")


def herm(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    return (m + m.conj().swapaxes(-1, -2)) / 2


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Possibly subnormalized positive operator on labelled tensor factors.

    The matrix is symmetrized on construction and validated against a
    tolerance relative to its spectral norm.
    """

    matrix: np.ndarray
    factors: tuple[SystemLabel, ...]
    normalized: bool = True

    def __init__(self, matrix, factors=None, normalized: bool | None = None, tol: float = HERM_TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density operator must be square, got {m.shape}")
        if factors is None:
            factors = [m.shape[0]]
        labels = _as_labels(factors)
        if math.prod(f.dim for f in labels) != m.shape[0]:
            raise DimensionError(f"factor dims {[f.dim for f in labels]} do not match {m.shape}")
        check_dim(m.shape[0])
        scale = max(1.0, float(np.linalg.norm(m, 2)))
        if np.max(np.abs(m - m.conj().T)) > tol * scale:
            raise NotPositiveError("operator is not Hermitian within tolerance")
        m = herm(m)
        ev = np.linalg.eigvalsh(m)
        if ev[0] < -tol * scale:
            raise NotPositiveError(f"operator has eigenvalue {ev[0]:.3e} below -tol")
        tr = float(np.real(np.trace(m)))
        if tr > 1 + tol * max(1, m.shape[0]):
            raise NotPositiveError(f"trace {tr} exceeds 1")
        if normalized is None:
            normalized = abs(tr - 1) <= 1e-8
        elif normalized and abs(tr - 1) > 1e-8:
            raise NotPositiveError(f"normalized state has trace {tr}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "factors", labels)
        object.__setattr__(self, "normalized", bool(normalized))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.factors)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def index(self, names) -> list[int]:
        if isinstance(names, (str, SystemLabel)):
            names = [names]
        out = []
        for n in names:
            n = n.name if isinstance(n, SystemLabel) else n
            if n not in self.names:
                raise DimensionError(f"unknown system {n!r}; have {self.names}")
            out.append(self.names.index(n))
        return out

    def ptrace(self, keep) -> "DensityOperator":
        return partial_trace(self, keep)

    def __repr__(self):
        return f"DensityOperator({'x'.join(self.names)}, dims={self.dims}, trace={self.trace:.6g})"


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray
    factors: tuple[SystemLabel, ...]

    def __init__(self, vector, factors=None, tol: float = 1e-9):
        v = np.array(vector, dtype=complex).reshape(-1)
        labels = _as_labels(factors if factors is not None else [v.size])
        if math.prod(f.dim for f in labels) != v.size:
            raise DimensionError("factor dims do not match vector length")
        check_dim(v.size)
        if abs(np.linalg.norm(v) - 1) > tol:
            raise NotPositiveError(f"pure state has norm {np.linalg.norm(v)}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "factors", labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.factors)

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.factors, normalized=True)


@dataclass(frozen=True, eq=False)
class Isometry:
    """Matrix ``V`` (d_out x d_in) with ``V^dag V = 1``."""

    matrix: np.ndarray
    in_label: SystemLabel
    out_labels: tuple[SystemLabel, ...] = field(default=())

    def __init__(self, matrix, in_label=None, out_labels=None, tol: float = 1e-8):
        v = np.array(matrix, dtype=complex)
        if v.ndim != 2 or v.shape[0] < v.shape[1]:
            raise DimensionError(f"isometry must be tall, got {v.shape}")
        res = isometry_residual(v)
        if res > tol:
            raise NotPositiveError(f"not an isometry: |V^dag V - 1| = {res:.3e}")
        in_label = _as_labels([in_label if in_label is not None else v.shape[1]])[0]
        outs = _as_labels(out_labels if out_labels is not None else [v.shape[0]])
        if math.prod(f.dim for f in outs) != v.shape[0] or in_label.dim != v.shape[1]:
            raise DimensionError("labels do not match isometry shape")
        v.setflags(write=False)
        object.__setattr__(self, "matrix", v)
        object.__setattr__(self, "in_label", in_label)
        object.__setattr__(self, "out_labels", outs)

    @property
    def out_dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.out_labels)


def isometry_residual(v: np.ndarray) -> float:
    v = np.asarray(v)
    return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1]), 2))


def as_matrix(state) -> np.ndarray:
    if isinstance(state, DensityOperator):
        return state.matrix
    if isinstance(state, PureState):
        return np.outer(state.vector, state.vector.conj())
    return np.asarray(state)


# ---------------------------------------------------------------------------
# eigen-based matrix functions
# ---------------------------------------------------------------------------


def eigh_psd(m: np.ndarray):
    w, v = np.linalg.eigh(herm(m))
    return np.clip(w, 0, None), v


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = eigh_psd(m)
    return (v * np.sqrt(w)) @ v.conj().T


def support_cutoff(w: np.ndarray, cutoff: float = EIG_CUTOFF) -> float:
    return cutoff * max(float(np.max(np.abs(w))) if w.size else 0.0, 1e-300)


def pinv_psd(m: np.ndarray, power: float = 1.0, cutoff: float = EIG_CUTOFF) -> np.ndarray:
    """Generalized inverse ``m^{-power}`` restricted to the support of ``m``."""
    w, v = np.linalg.eigh(herm(m))
    keep = w > support_cutoff(w, cutoff)
    wi = np.zeros_like(w)
    wi[keep] = w[keep] ** (-power)
    return (v * wi) @ v.conj().T


def support_basis(m: np.ndarray, cutoff: float = EIG_CUTOFF) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors spanning the support, descending."""
    w, v = np.linalg.eigh(herm(m))
    keep = w > support_cutoff(w, cutoff)
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return w, v


def rank(m: np.ndarray, cutoff: float = 1e-9) -> int:
    return int(support_basis(m, cutoff)[0].size)


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(herm(m)))))


def min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(herm(m))[0])


# ---------------------------------------------------------------------------
# tensor bookkeeping
# ---------------------------------------------------------------------------


def kron(*ops) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1
    return v


def max_entangled(d: int) -> np.ndarray:
    """Normalized ``sum_i |ii>/sqrt(d)`` as a vector."""
    return np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)


def ptrace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace keeping the subsystems in ``keep`` (in their original order).

    Works on a single matrix or on a stack of shape ``(k, D, D)``.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise DimensionError(f"subsystem index {k} out of range for {n} systems")
    rho = np.asarray(rho)
    batch = rho.shape[:-2]
    t = rho.reshape(batch + tuple(dims) + tuple(dims))
    nb = len(batch)
    traced = [i for i in range(n) if i not in keep]
    # letters for einsum
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    bl = letters[:nb]
    row = list(letters[nb:nb + n])
    col = list(letters[nb + n:nb + 2 * n])
    for i in traced:
        col[i] = row[i]
    out = bl + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum(bl + "".join(row) + "".join(col) + "->" + out, t)
    dk = math.prod(dims[i] for i in keep)
    return res.reshape(batch + (dk, dk))


def permute_systems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of an operator (or stack) so factor ``perm[k]`` lands at slot ``k``."""
    dims = list(dims)
    n = len(dims)
    m = np.asarray(m)
    batch = m.shape[:-2]
    nb = len(batch)
    t = m.reshape(batch + tuple(dims) + tuple(dims))
    axes = list(range(nb)) + [nb + p for p in perm] + [nb + n + p for p in perm]
    d = math.prod(dims)
    return t.transpose(axes).reshape(batch + (d, d))


def permute_vector(v: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    t = np.asarray(v).reshape(tuple(dims))
    return t.transpose(list(perm)).reshape(-1)


def permutation_matrix(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Unitary ``P`` with ``P (x_0 ⊗ ... ⊗ x_{n-1}) = x_{perm[0]} ⊗ ...``."""
    d = math.prod(dims)
    idx = np.arange(d).reshape(tuple(dims)).transpose(list(perm)).reshape(-1)
    p = np.zeros((d, d))
    p[np.arange(d), idx] = 1.0
    return p


def swap_operator(d: int) -> np.ndarray:
    return permutation_matrix([d, d], [1, 0])


def apply_on(op: np.ndarray, dims: Sequence[int], sites: Sequence[int]) -> np.ndarray:
    """Embed ``op`` acting on ``sites`` (in the given order) into the full space."""
    dims = list(dims)
    sites = list(sites)
    rest = [i for i in range(len(dims)) if i not in sites]
    full = np.kron(op, np.eye(math.prod(dims[i] for i in rest)))
    order = sites + rest
    inv = np.argsort(order)
    return permute_systems(full, [dims[i] for i in order], list(inv))


def partial_transpose(m: np.ndarray, dims: Sequence[int], sys: int) -> np.ndarray:
    dims = list(dims)
    n = len(dims)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return t.transpose(axes).reshape(m.shape)


# ---------------------------------------------------------------------------
# state-level operations
# ---------------------------------------------------------------------------


def _matrix_pair(rho, sigma):
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch {a.shape} vs {b.shape}")
    for m in (a, b):
        scale = max(1.0, float(np.linalg.norm(m, 2)))
        if min_eig(m) < -HERM_TOL * scale:
            raise NotPositiveError("fidelity input is not PSD")
    return herm(a), herm(b)


def fidelity(rho, sigma) -> float:
    """Root fidelity ``||sqrt(rho) sqrt(sigma)||_1``, extended to subnormalized inputs."""
    a, b = _matrix_pair(rho, sigma)
    sv = np.linalg.svd(sqrtm_psd(a) @ sqrtm_psd(b), compute_uv=False)
    ta, tb = float(np.real(np.trace(a))), float(np.real(np.trace(b)))
    f = float(np.sum(sv)) + math.sqrt(max(0.0, 1 - ta) * max(0.0, 1 - tb))
    return min(1.0, max(0.0, f))


def purified_distance(rho, sigma) -> float:
    f = fidelity(rho, sigma)
    return math.sqrt(max(0.0, 1 - f * f))


def trace_distance(rho, sigma) -> float:
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


def partial_trace(state: DensityOperator, keep) -> DensityOperator:
    if isinstance(state, PureState):
        state = state.density()
    idx = state.index(keep)
    idx_sorted = sorted(idx)
    m = ptrace(state.matrix, state.dims, idx_sorted)
    labels = [state.factors[i] for i in idx_sorted]
    if idx != idx_sorted:
        order = [idx_sorted.index(i) for i in idx]
        m = permute_systems(m, [f.dim for f in labels], order)
        labels = [labels[o] for o in order]
    return DensityOperator(m, labels, normalized=state.normalized, tol=1e-7)


def purify(rho: np.ndarray, cutoff: float = EIG_CUTOFF) -> np.ndarray:
    """Purification on ``AB ⊗ C`` with ``|C| = rank(rho)`` as a matrix (d x r).

    Returns ``M`` such that ``|psi> = vec(M)`` (row-major) purifies ``rho``;
    i.e. ``M M^dag = rho``.
    """
    w, v = support_basis(rho, cutoff)
    if w.size == 0:
        return np.zeros((rho.shape[0], 1), dtype=complex)
    return v * np.sqrt(w)


def generalized_inverse_lognorm(rho) -> float:
    """``log2 ||rho^{-1}||`` with the inverse restricted to the support."""
    m = as_matrix(rho)
    w, _ = support_basis(m)
    if w.size == 0:
        raise ValueError("generalized inverse of the zero operator is undefined")
    return float(-math.log2(w[-1]))


# ---------------------------------------------------------------------------
# symmetric subspace
# ---------------------------------------------------------------------------


def symmetric_projector(d: int, n: int) -> tuple[np.ndarray, int]:
    """Projector onto ``Sym^n(C^d)`` and its dimension ``C(n+d-1, n)``."""
    if d < 1 or n < 0:
        raise DimensionError("need d >= 1, n >= 0")
    check_dim(d ** n)
    from itertools import permutations

    dims = [d] * n
    p = np.zeros((d ** n, d ** n))
    perms = list(permutations(range(n)))
    for perm in perms:
        p += permutation_matrix(dims, perm)
    p /= len(perms)
    return p, math.comb(n + d - 1, n)


# ---------------------------------------------------------------------------
# Haar sampling
# ---------------------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_state(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_projector(dim: int, rank_: int, seed=None) -> np.ndarray:
    if not 0 <= rank_ <= dim:
        raise DimensionError(f"rank {rank_} must lie in [0, {dim}]")
    u = haar_unitary(dim, seed)[:, :rank_]
    return u @ u.conj().T


def haar_sample(kind: str, dim: int, seed=None, rank: int | None = None) -> np.ndarray:
    if kind == "state":
        return haar_state(dim, seed)
    if kind == "unitary":
        return haar_unitary(dim, seed)
    if kind == "projector":
        if rank is None:
            raise ValueError("projector sampling needs a rank")
        return haar_projector(dim, rank, seed)
    raise ValueError(f"unknown Haar sample kind {kind!r}")


def random_density(dim: int, seed=None, rank_: int | None = None) -> np.ndarray:
    """Density matrix from the induced measure (partial trace of a Haar pure state)."""
    rng = _rng(seed)
    r = dim if rank_ is None else rank_
    g = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    rho = g @ g.conj().T
    return herm(rho / np.trace(rho).real)
