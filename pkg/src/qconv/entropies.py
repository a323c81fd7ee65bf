"""Von Neumann and one-shot conditional entropies.

All logarithms are base 2.  Conditional min-entropy is computed from the
semidefinite program ``2^{-H_min(A|B)} = min Tr σ  s.t.  1_A ⊗ σ >= ρ``;
max-entropy follows from duality on a purification,
``H_max(A|B)_ρ = -H_min(A|C)_ψ``.

Smoothing uses the purified-distance ball of subnormalized operators.  The
default route keeps the problem on ``AB``: the fidelity with the fixed
state is the semidefinite representable quantity
``max Re Tr Y  s.t.  [[ρ', Y], [Y^dag, ρ]] >= 0``, restricted to the
support of ``ρ``.  By Uhlmann's theorem this equals optimizing over
extensions of a purification, which is the formulation of
:func:`smooth_hmin_purified_dual` (kept as an independent route).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import sdp
from .matqi import (
    DensityOperator,
    DimensionError,
    PureState,
    as_matrix,
    generalized_inverse_lognorm,
    herm,
    permute_systems,
    ptrace,
    purify,
    support_basis,
)

LOG_FLOOR = 1e-14
BOUNDARY_TOL = 1e-12


class EntropyError(ValueError):
    """Raised for invalid entropy queries (labels, smoothing range)."""


# ---------------------------------------------------------------------------
# von Neumann quantities
# ---------------------------------------------------------------------------


def binary_entropy(p: float) -> float:
    if p < 0 or p > 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def _entropy(m: np.ndarray) -> float:
    w = np.linalg.eigvalsh(herm(m))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def von_neumann(rho) -> float:
    """``S(ρ) = -Tr ρ log ρ`` for a normalized state."""
    m = as_matrix(rho)
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1) > 1e-8:
        raise EntropyError(f"von Neumann entropy needs a normalized state (trace {tr})")
    return _entropy(m)


def conditional_entropy(rho: np.ndarray, dims: Sequence[int], target: Sequence[int], cond: Sequence[int]) -> float:
    """``S(A|B) = S(AB) - S(B)`` for sites ``target`` and ``cond``."""
    ab = ptrace(rho, dims, sorted(set(target) | set(cond)))
    b = ptrace(rho, dims, sorted(cond)) if cond else np.ones((1, 1))
    return _entropy(ab) - _entropy(b)


def coherent_information(channel, rho) -> float:
    """``I(A>B) = S(B) - S(AB)`` of ``(id ⊗ N)φ`` with ``φ`` purifying ``rho``."""
    m = as_matrix(rho)
    if m.shape != (channel.din, channel.din):
        raise DimensionError(f"input has shape {m.shape}, channel expects {channel.din}")
    if abs(np.trace(m).real - 1) > 1e-8:
        raise EntropyError("coherent information needs a normalized input")
    mat = purify(m)  # |φ> = sum_ia M[a', i] |i>_A |a'>_{A'} with A of dim rank
    r = mat.shape[1]
    phi = np.outer(mat.T.reshape(-1), mat.T.reshape(-1).conj())
    rho_ab = channel.apply_local(phi, [r, channel.din], 1)
    return _entropy(ptrace(rho_ab, [r, channel.dout], [1])) - _entropy(rho_ab)


def _coherent_fast(channel, comp, rho) -> float:
    return _entropy(channel(rho)) - _entropy(comp(rho))


def _log2_floor(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(herm(m))
    return (v * np.log2(np.clip(w, LOG_FLOOR, None))) @ v.conj().T


def _project_density(h: np.ndarray) -> np.ndarray:
    """Euclidean projection of a Hermitian matrix onto density matrices."""
    w, v = np.linalg.eigh(herm(h))
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1
    k = np.nonzero(u - css / np.arange(1, u.size + 1) > 0)[0][-1]
    theta = css[k] / (k + 1)
    w = np.clip(w - theta, 0, None)
    return (v * w) @ v.conj().T


@dataclass
class Q1Result:
    value: float
    state: np.ndarray
    iterations: int
    converged: bool
    restarts: int
    grid_value: float | None = None
    degrading_check: float | None = None
    history: list = field(default_factory=list)


def q1(channel, restarts: int = 20, seed: int = 0, max_iter: int = 3000, tol: float = 1e-13,
       grid: bool = True, dilation_entropy=None) -> Q1Result:
    """Single-letter coherent information ``Q^(1)(N)`` by projected gradient ascent.

    :param channel: the channel.
    :param restarts: number of starts (the maximally mixed input plus random ones).
    :param seed: seed for the random starting points.
    :param grid: for qubit inputs also scan a Bloch-ball grid as a cross-check.
    :param dilation_entropy: optional callable ``rho -> S(F|E')`` used to
        re-evaluate the objective at the optimizer (degradable channels).
    """
    from .channels import complementary

    comp = complementary(channel)
    d = channel.din
    rng = np.random.default_rng(seed)
    starts = [np.eye(d) / d]
    for _ in range(max(0, restarts - 1)):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        r = g @ g.conj().T
        starts.append(r / np.trace(r).real)

    def f(r):
        return _coherent_fast(channel, comp, r)

    def grad(r):
        return herm(-channel.adjoint(_log2_floor(channel(r))) + comp.adjoint(_log2_floor(comp(r))))

    best = (-math.inf, None)
    total_it = 0
    all_conv = True
    history = []
    for r in starts:
        fr = f(r)
        step = 1.0
        conv = False
        for it in range(max_iter):
            g = grad(r)
            while True:
                cand = _project_density(r + step * g)
                fc = f(cand)
                if fc >= fr + 1e-4 * float(np.real(np.vdot(g, cand - r))) or step < 1e-12:
                    break
                step /= 2
            moved = np.max(np.abs(cand - r))
            gain = fc - fr
            if fc >= fr:
                r, fr = cand, fc
            step = min(step * 2, 1e3)
            total_it += 1
            if moved < 1e-10 or (0 <= gain < tol and moved < 1e-7) or step < 1e-12:
                conv = True
                break
        all_conv &= conv
        history.append(fr)
        if fr > best[0]:
            best = (fr, r)
    value, state = best
    res = Q1Result(value, state, total_it, all_conv, len(starts), history=history)
    if grid and d == 2:
        res.grid_value = _bloch_grid_max(channel, comp)
    if dilation_entropy is not None:
        res.degrading_check = float(dilation_entropy(state))
    return res


def _bloch_grid_max(channel, comp, n_r: int = 21, n_t: int = 25, n_p: int = 48) -> float:
    rs = np.linspace(0, 1, n_r)
    ts = np.linspace(0, np.pi, n_t)
    ps = np.linspace(0, 2 * np.pi, n_p, endpoint=False)
    R, T, P = np.meshgrid(rs, ts, ps, indexing="ij")
    x = (R * np.sin(T) * np.cos(P)).ravel()
    y = (R * np.sin(T) * np.sin(P)).ravel()
    z = (R * np.cos(T)).ravel()
    rho = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]).transpose(2, 0, 1)
    return float(np.max(_batched_entropy(channel(rho)) - _batched_entropy(comp(rho))))


def _batched_entropy(stack: np.ndarray) -> np.ndarray:
    w = np.clip(np.linalg.eigvalsh(herm(stack)), 1e-300, None)
    return -np.sum(np.where(w > 1e-15, w * np.log2(w), 0.0), axis=-1)


# ---------------------------------------------------------------------------
# queries on labelled states
# ---------------------------------------------------------------------------


@dataclass
class EntropyQuery:
    """Conditional entropy of ``target`` given ``conditioning`` on a labelled state."""

    state: object
    target: Sequence[str]
    conditioning: Sequence[str] = ()
    eps: float = 0.0

    def __post_init__(self):
        if isinstance(self.target, str):
            self.target = [self.target]
        if isinstance(self.conditioning, str):
            self.conditioning = [self.conditioning]
        if set(self.target) & set(self.conditioning):
            raise EntropyError("target and conditioning systems must be disjoint")
        if not 0 <= self.eps < 1:
            raise EntropyError(f"smoothing parameter must lie in [0, 1), got {self.eps}")

    def bipartite(self) -> tuple[np.ndarray, int, int]:
        st = self.state
        if isinstance(st, PureState):
            st = st.density()
        if not isinstance(st, DensityOperator):
            raise EntropyError("query state must be a DensityOperator or PureState")
        names = list(self.target) + list(self.conditioning)
        marg = st.ptrace(names)
        da = math.prod(marg.dims[: len(self.target)])
        db = math.prod(marg.dims[len(self.target):])
        return marg.matrix, da, db


def _check_eps(eps: float) -> float:
    if not 0 <= eps < 1 - BOUNDARY_TOL:
        raise EntropyError(f"smoothing parameter must lie in [0, 1), got {eps}")
    return float(eps)


def hmin(query: EntropyQuery) -> float:
    rho, da, db = query.bipartite()
    return hmin_bipartite(rho, da, db)


def hmax(query: EntropyQuery) -> float:
    rho, da, db = query.bipartite()
    return hmax_bipartite(rho, da, db)


def hmin_smooth(query: EntropyQuery) -> float:
    rho, da, db = query.bipartite()
    return hmin_smooth_bipartite(rho, da, db, query.eps)


def hmax_smooth(query: EntropyQuery) -> float:
    rho, da, db = query.bipartite()
    return hmax_smooth_bipartite(rho, da, db, query.eps)


# ---------------------------------------------------------------------------
# min-entropy SDPs on a bipartite matrix (A first, B second)
# ---------------------------------------------------------------------------


def _log_or_inf(v: float) -> float:
    return -math.log2(v) if v > 0 else math.inf


def hmin_bipartite(rho: np.ndarray, da: int, db: int, return_solution: bool = False):
    """``H_min(A|B)`` with ``2^{-H} = min Tr σ  s.t.  1_A ⊗ σ >= ρ``."""
    rho = herm(np.asarray(rho, dtype=complex))
    if rho.shape != (da * db, da * db):
        raise DimensionError(f"state shape {rho.shape} does not match {da}x{db}")
    p = sdp.SdpProblem("hmin")
    sig = p.hermitian("sigma", db)
    p.add_constraint("dom", [(sig, sdp.kron_left(np.eye(da)))], ">=", const=-rho)
    p.minimize([(sig, sdp.trace_map)])
    sol = sdp.solve(p, raise_on_fail=True)
    val = _log_or_inf(sol.primal_value)
    return (val, sol) if return_solution else val


def hmin_smooth_bipartite(rho: np.ndarray, da: int, db: int, eps: float, return_solution: bool = False):
    """``H_min^ε(A|B)``: min-entropy maximized over the purified-distance ball.

    ``2^{-H} = min Tr σ`` over ``σ`` and subnormalized ``ρ'`` with
    ``1 ⊗ σ >= ρ'`` and ``F(ρ', ρ) >= sqrt(1 - ε^2)`` (generalized fidelity).
    """
    eps = _check_eps(eps)
    if eps == 0:
        return hmin_bipartite(rho, da, db, return_solution)
    rho = herm(np.asarray(rho, dtype=complex))
    d = da * db
    if rho.shape != (d, d):
        raise DimensionError(f"state shape {rho.shape} does not match {da}x{db}")
    w, v = support_basis(rho)
    r = w.size
    t = float(np.sum(w))
    p = sdp.SdpProblem("hmin_smooth")
    sig = p.hermitian("sigma", db)
    rp = p.hermitian("rho", d)
    z = p.complex_matrix("Z", d, r)
    p.add_constraint("dom", [(sig, sdp.kron_left(np.eye(da))), (rp, sdp.scaled(sdp._ident, -1.0))], ">=")
    shape = ((d, r), (d, r))
    lam = np.zeros((d + r, d + r), dtype=complex)
    lam[d:, d:] = np.diag(w)
    p.add_constraint("fid", [(rp, sdp.block_map(shape, (0, 0))), (z, sdp.block_map(shape, (0, 1), "herm"))],
                     ">=", const=lam)
    p.add_constraint("trace", [(rp, sdp.trace_map)], "<=", const=-1.0)
    fid_terms = [(z, sdp.inner_map(v))]
    if 1 - t > BOUNDARY_TOL:
        # generalized fidelity: the deficits 1 - Tr ρ' and 1 - Tr ρ form an extra 2x2 block
        zs = p.scalar("zeta")
        p.add_constraint("fid_deficit", [
            (rp, lambda x: np.einsum("k,ij->kij", -sdp.trace_map(x), np.array([[1.0, 0], [0, 0]]))),
            (zs, sdp.scalar_times(np.array([[0, 1.0], [1.0, 0]]))),
        ], ">=", const=np.diag([1.0, 1 - t]))
        fid_terms.append((zs, sdp.scalar_id))
    p.add_constraint("fidelity", fid_terms, ">=", const=-math.sqrt(1 - eps ** 2))
    p.minimize([(sig, sdp.trace_map)])
    sol = sdp.solve(p, raise_on_fail=True)
    val = _log_or_inf(sol.primal_value)
    return (val, sol) if return_solution else val


def purification_complement(rho: np.ndarray, da: int, db: int) -> tuple[np.ndarray, int]:
    """``ρ^{AC}`` of a purification of ``ρ^{AB}`` with ``|C| = rank(ρ^{AB})``."""
    m = purify(herm(rho))  # columns indexed by C
    r = m.shape[1]
    psi = m.reshape(da, db, r)
    rho_ac = np.einsum("abc,AbC->acAC", psi, psi.conj()).reshape(da * r, da * r)
    return rho_ac, r


def hmax_bipartite(rho: np.ndarray, da: int, db: int) -> float:
    rho_ac, dc = purification_complement(rho, da, db)
    return -hmin_bipartite(rho_ac, da, dc)


def hmax_smooth_bipartite(rho: np.ndarray, da: int, db: int, eps: float) -> float:
    """``H_max^ε(A|B)_ρ = -H_min^ε(A|C)_ψ`` for a purification ``ψ``."""
    eps = _check_eps(eps)
    rho_ac, dc = purification_complement(rho, da, db)
    return -hmin_smooth_bipartite(rho_ac, da, dc, eps)


def hmax_fidelity(rho: np.ndarray, da: int, db: int) -> float:
    """``H_max(A|B) = log max_σ F(ρ, 1 ⊗ σ)^2``, solved directly as an SDP."""
    rho = herm(np.asarray(rho, dtype=complex))
    d = da * db
    w, v = support_basis(rho)
    r = w.size
    p = sdp.SdpProblem("hmax_fidelity")
    sig = p.hermitian("sigma", db)
    y = p.complex_matrix("Y", r, d)
    shape = ((r, d), (r, d))
    lam = np.zeros((r + d, r + d), dtype=complex)
    lam[:r, :r] = np.diag(w)
    p.add_constraint("block", [
        (sig, sdp.compose(sdp.block_map(shape, (1, 1)), sdp.kron_left(np.eye(da)))),
        (y, sdp.block_map(shape, (0, 1), "herm")),
    ], ">=", const=lam)
    p.add_constraint("normalized", [(sig, sdp.trace_map)], "==", const=-1.0)
    # F = max Re Tr(V Y)
    p.maximize([(y, sdp.inner_map(v.conj().T))])
    sol = sdp.solve(p, raise_on_fail=True)
    return 2 * math.log2(sol.primal_value)


# ---------------------------------------------------------------------------
# purified formulation on G E E' and its dual
# ---------------------------------------------------------------------------


@dataclass
class PurifiedDualSolution:
    value: float
    r: float
    s: float
    X: np.ndarray
    rho: np.ndarray  # optimal primal operator on G E E'
    sigma: np.ndarray  # optimal primal σ on E
    solution: object


def _psi_vector(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return np.asarray(psi.vector)
    return np.asarray(psi, dtype=complex).reshape(-1)


def smooth_hmin_purified_dual(psi, dims: Sequence[int], delta: float, real: bool | None = None) -> PurifiedDualSolution:
    """Solve ``max δ r - s`` over ``r, s >= 0``, ``X >= 0`` on ``GE`` with
    ``r ψ <= X ⊗ 1 + s 1`` and ``Tr_G X <= 1``.

    The optimum equals ``2^{-H_min^ε(G|E)}`` for ``δ = 1 - ε^2``; the primal
    optimizers ``ρ`` (on ``GEE'``) and ``σ`` (on ``E``) are returned as the
    constraint multipliers.
    """
    vec = _psi_vector(psi)
    dg, de, dep = (int(x) for x in dims)
    if vec.size != dg * de * dep:
        raise DimensionError(f"state of length {vec.size} does not match dims {dims}")
    if not 0 < delta <= 1:
        raise EntropyError(f"δ must lie in (0, 1], got {delta}")
    if real is None:
        real = bool(np.max(np.abs(vec.imag)) == 0)
    proj = np.outer(vec, vec.conj())
    p = sdp.SdpProblem("hmin_smooth_purified_dual")
    r = p.scalar("r", nonneg=True)
    s = p.scalar("s", nonneg=True)
    x = p.hermitian("X", dg * de, psd=True, real=real)
    p.add_constraint("op", [
        (x, sdp.kron_right(np.eye(dep))),
        (s, sdp.scalar_times(np.eye(dg * de * dep))),
        (r, sdp.scalar_times(-proj)),
    ], ">=")
    p.add_constraint("trX", [(x, sdp.scaled(sdp.ptrace_map([dg, de], [1]), -1.0))], ">=", const=np.eye(de))
    p.maximize([(r, sdp.scaled(sdp.scalar_id, delta)), (s, sdp.scaled(sdp.scalar_id, -1.0))])
    sol = sdp.solve(p, raise_on_fail=True)
    return PurifiedDualSolution(sol.primal_value, sol["r"], sol["s"], np.asarray(sol["X"]),
                                sol.duals["op"], sol.duals["trX"], sol)


def hmin_smooth_dual_value(psi, dims: Sequence[int], delta: float, candidate, tol: float = 1e-8):
    """Check a dual candidate ``(r, s, X)`` and return ``(feasible, δ r - s, residuals)``.

    A feasible candidate certifies ``2^{-H_min^ε(G|E)} >= δ r - s``.
    """
    r, s, x = candidate
    vec = _psi_vector(psi)
    dg, de, dep = (int(v) for v in dims)
    x = np.asarray(x, dtype=complex)
    if x.shape != (dg * de, dg * de) or vec.size != dg * de * dep:
        raise DimensionError("candidate or state does not match dims")
    scale = max(1.0, abs(r), abs(s), float(np.linalg.norm(x, 2)))
    res = {
        "r>=0": max(0.0, -float(r)),
        "s>=0": max(0.0, -float(s)),
        "X>=0": max(0.0, -float(np.linalg.eigvalsh(herm(x))[0])),
        "op": max(0.0, -float(np.linalg.eigvalsh(
            herm(np.kron(x, np.eye(dep)) + s * np.eye(dg * de * dep) - r * np.outer(vec, vec.conj())))[0])),
        "trX": max(0.0, float(np.linalg.eigvalsh(herm(ptrace(x, [dg, de], [1])))[-1]) - 1.0),
    }
    feasible = all(v <= tol * scale for v in res.values())
    return feasible, float(delta * r - s), res


# ---------------------------------------------------------------------------
# asymptotic equipartition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AepParams:
    mu_b: float
    mu_c: float
    n: int
    eps: float

    def __post_init__(self):
        if self.n < 1:
            raise EntropyError("n must be >= 1")
        if self.mu_b < 0 or self.mu_c < 0:
            raise EntropyError("μ values must be >= 0")
        if not 0 < self.eps < 1:
            raise EntropyError(f"ε must lie in (0, 1), got {self.eps}")


def aep_correction(params: AepParams) -> float:
    return (params.mu_b + params.mu_c) * math.sqrt(params.n * math.log(2 / params.eps))


def aep_bound(params: AepParams, s_cond: float, side: str) -> float:
    """``n S(A|B) ∓ (μ_B + μ_C) sqrt(n ln(2/ε))``.

    :param side: ``"min_lower"`` (lower bound on the smooth min-entropy) or
        ``"max_upper"`` (upper bound on the smooth max-entropy).
    """
    corr = aep_correction(params)
    if side == "min_lower":
        return params.n * s_cond - corr
    if side == "max_upper":
        return params.n * s_cond + corr
    raise EntropyError(f"unknown side {side!r}")


def aep_params_for(rho_ab: np.ndarray, da: int, db: int, n: int, eps: float) -> tuple[AepParams, float]:
    """``μ_B``, ``μ_C`` from a purification of ``ρ^{AB}`` and ``S(A|B)``."""
    rho_ab = herm(rho_ab)
    rho_b = ptrace(rho_ab, [da, db], [1])
    rho_ac, dc = purification_complement(rho_ab, da, db)
    rho_c = ptrace(rho_ac, [da, dc], [1])
    params = AepParams(generalized_inverse_lognorm(rho_b), generalized_inverse_lognorm(rho_c), n, eps)
    return params, _entropy(rho_ab) - _entropy(rho_b)


@dataclass
class TypicalProjector:
    projector: np.ndarray
    weight: float
    bound: float
    mu: float


def typical_projector(rho, n: int, delta: float, sign: str = "+") -> TypicalProjector:
    """Entropy-typical projector of ``ρ^{⊗n}`` in its eigenbasis.

    ``+``: strings with ``sum -log λ <= n S + Δ sqrt(n)``;
    ``-``: strings with ``sum -log λ >= n S - Δ sqrt(n)``.  Only strings in
    the support are kept.  The Hoeffding guarantee
    ``Tr ρ^{⊗n} P >= 1 - exp(-2Δ²/μ²)`` is checked on every call.
    """
    m = herm(as_matrix(rho))
    d = m.shape[0]
    from .matqi import check_dim

    check_dim(d ** n)
    if sign not in ("+", "-"):
        raise EntropyError("sign must be '+' or '-'")
    w, v = np.linalg.eigh(m)
    keep = w > 1e-12 * max(1.0, w[-1])
    w, v = w[keep], v[:, keep]
    s = float(-np.sum(w * np.log2(w)))
    mu = float(-math.log2(w.min()))
    k = w.size
    logs = -np.log2(w)
    grid = np.stack(np.meshgrid(*([np.arange(k)] * n), indexing="ij"), -1).reshape(-1, n)
    tot = logs[grid].sum(axis=1)
    probs = np.prod(w[grid], axis=1)
    thr = delta * math.sqrt(n)
    sel = tot <= n * s + thr + 1e-12 if sign == "+" else tot >= n * s - thr - 1e-12
    vn = v
    for _ in range(n - 1):
        vn = np.kron(vn, v)
    cols = vn[:, sel]
    proj = cols @ cols.conj().T
    weight = float(np.sum(probs[sel]))
    bound = 1.0 if mu == 0 else 1 - math.exp(-2 * delta ** 2 / mu ** 2)
    if weight < bound - 1e-12:
        raise ArithmeticError(f"typical weight {weight} below Hoeffding bound {bound}")
    return TypicalProjector(proj, weight, bound, mu)


# ---------------------------------------------------------------------------
# permutation-reduced smooth min-entropy of tensor powers
# ---------------------------------------------------------------------------


def _site_order(n: int) -> list[int]:
    # (A1 C1 A2 C2 ...) from (A1..An C1..Cn)
    order = []
    for k in range(n):
        order += [k, n + k]
    return order


def hmin_smooth_iid(rho_ac: np.ndarray, da: int, dc: int, n: int, eps: float, return_solution: bool = False):
    """``H_min^ε(A^n|C^n)`` of ``(ρ^{AC})^{⊗n}`` using permutation symmetry.

    The optimum may be taken permutation invariant (averaging a feasible
    point over site permutations keeps it feasible with the same value), so
    ``ρ'`` is parametrized by its Schur-Weyl blocks and ``σ`` by the
    invariant operators on ``C^n``.  Each Loewner constraint splits into one
    block per irrep.
    """
    from .symmetry import invariant_hermitian_basis, isotypic_bases

    eps = _check_eps(eps)
    rho_ac = herm(np.asarray(rho_ac, dtype=complex))
    d = da * dc
    omega = rho_ac
    for _ in range(n - 1):
        omega = np.kron(omega, rho_ac)  # (AC)^n ordering
    blocks = isotypic_bases(d, n)
    sig_basis = invariant_hermitian_basis(dc, n)
    nb = sig_basis.shape[0]
    nvars = nb + sum(w.shape[1] ** 2 + 2 * w.shape[1] * min(w.shape[1], d ** n) for _, _, w in blocks) if eps > 0 else nb
    if nvars > sdp.MAX_VARS:
        raise DimensionError(f"reduced program has about {nvars} real variables, above the guard {sdp.MAX_VARS}")
    # compress 1_{A^n} ⊗ B_k onto each block one basis element at a time;
    # rows of W are reordered from (AC)^n to A^n C^n so B_k acts on one axis
    inv = np.argsort(_site_order(n))
    w_split = []
    for _, _, w in blocks:
        t = w.reshape([da, dc] * n + [w.shape[1]]).transpose(list(inv) + [2 * n])
        w_split.append(t.reshape(da ** n, dc ** n, w.shape[1]))
    s_blocks = [np.empty((nb, w.shape[2], w.shape[2]), dtype=complex) for w in w_split]
    for k, b in enumerate(sig_basis):
        for s_l, w in zip(s_blocks, w_split):
            s_l[k] = np.einsum("acm,acn->mn", w.conj(), np.einsum("cd,adn->acn", b, w))
    p = sdp.SdpProblem("hmin_smooth_iid")
    c = p.complex_matrix("c", nb, 1, real=True)
    traces = np.real(np.trace(sig_basis, axis1=1, axis2=2))

    def coeff_map(mats):
        def f(x):
            return np.einsum("kb,bij->kij", x[:, :, 0], mats)

        return f

    fid_terms = []
    tr_terms = []
    for idx, (lam, f, w) in enumerate(blocks):
        m = w.shape[1]
        if m == 0:
            continue
        s_l = s_blocks[idx]
        om = herm(w.conj().T @ omega @ w)
        if eps == 0:
            p.add_constraint(f"dom{idx}", [(c, coeff_map(s_l))], ">=", const=-om)
            continue
        rv = p.hermitian(f"rho{idx}", m)
        p.add_constraint(f"dom{idx}", [(c, coeff_map(s_l)), (rv, sdp.scaled(sdp._ident, -1.0))], ">=")
        tr_terms.append((rv, sdp.scaled(sdp.trace_map, float(f))))
        wl, vl = support_basis(om)
        r = wl.size
        lamb = np.zeros((m + r, m + r), dtype=complex)
        lamb[m:, m:] = np.diag(wl)
        shape = ((m, r), (m, r))
        if r == 0:
            p.add_constraint(f"psd{idx}", [(rv, sdp._ident)], ">=")
            continue
        z = p.complex_matrix(f"Z{idx}", m, r)
        p.add_constraint(f"fid{idx}", [(rv, sdp.block_map(shape, (0, 0))), (z, sdp.block_map(shape, (0, 1), "herm"))],
                         ">=", const=lamb)
        fid_terms.append((z, sdp.scaled(sdp.inner_map(vl), float(f))))
    if eps > 0:
        p.add_constraint("trace", tr_terms, "<=", const=-1.0)
        p.add_constraint("fidelity", fid_terms, ">=", const=-math.sqrt(1 - eps ** 2))
    p.minimize([(c, lambda x: x[:, :, 0] @ traces)])
    sol = sdp.solve(p, raise_on_fail=True)
    val = _log_or_inf(sol.primal_value)
    return (val, sol) if return_solution else val


def hmax_smooth_iid(rho_ab: np.ndarray, da: int, db: int, n: int, eps: float) -> float:
    """``H_max^ε(A^n|B^n)`` of ``(ρ^{AB})^{⊗n}`` via duality and permutation symmetry."""
    rho_ac, dc = purification_complement(rho_ab, da, db)
    return -hmin_smooth_iid(rho_ac, da, dc, n, eps)


def tensor_power_state(rho_ab: np.ndarray, da: int, db: int, n: int) -> np.ndarray:
    """``(ρ^{AB})^{⊗n}`` reordered to ``A^n B^n``."""
    out = rho_ab
    for _ in range(n - 1):
        out = np.kron(out, rho_ab)
    return permute_systems(out, [da, db] * n, [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])


# ---------------------------------------------------------------------------
# example states
# ---------------------------------------------------------------------------


def erasure_extremal_state(d: int) -> PureState:
    """``(Φ^{ÃE}|*>^{E'} + Φ^{ÃE'}|*>^{E}) / sqrt(2)`` with ``|E| = |E'| = d + 1``.

    The environment and output each carry the erased flag as their last
    level; returned on factors ``(Ã, E, E')``.
    """
    de = d + 1
    psi = np.zeros((d, de, de), dtype=complex)
    for i in range(d):
        psi[i, i, d] += 1 / math.sqrt(2 * d)
        psi[i, d, i] += 1 / math.sqrt(2 * d)
    return PureState(psi.reshape(-1), [("At", d), ("E", de), ("Ep", de)])


# ---------------------------------------------------------------------------
# numeric checks of the one-shot entropy inequalities
# ---------------------------------------------------------------------------


@dataclass
class InequalityCheck:
    """``lhs <= rhs`` evaluated numerically; ``violation = lhs - rhs``."""

    name: str
    lhs: float
    rhs: float

    @property
    def violation(self) -> float:
        return self.lhs - self.rhs

    def holds(self, slack: float = 1e-5) -> bool:
        return self.violation <= slack


def _smooth(kind: str, rho: np.ndarray, da: int, db: int, eps: float) -> float:
    if kind == "min":
        return hmin_smooth_bipartite(rho, da, db, eps) if eps > 0 else hmin_bipartite(rho, da, db)
    if kind == "max":
        return hmax_smooth_bipartite(rho, da, db, eps) if eps > 0 else hmax_bipartite(rho, da, db)
    raise ValueError(f"kind must be 'min' or 'max', got {kind!r}")


def _split(rho_abc: np.ndarray, dims: Sequence[int]):
    da, db, dc = (int(x) for x in dims)
    rho_abc = herm(np.asarray(rho_abc, dtype=complex))
    if rho_abc.shape != (da * db * dc,) * 2:
        raise DimensionError("state does not match dims")
    return rho_abc, da, db, dc


def check_monotonicity(rho_abc, dims, eps: float, kind: str = "min", channel=None) -> InequalityCheck:
    """``H^ε(A|BC) <= H^ε(A|B')`` where ``B'`` is ``B`` or ``channel(BC)``.

    Without a channel the map is the partial trace over ``C``.
    """
    rho, da, db, dc = _split(rho_abc, dims)
    lhs = _smooth(kind, rho, da, db * dc, eps)
    if channel is None:
        red, dout = ptrace(rho, [da, db, dc], [0, 1]), db
    else:
        if channel.din != db * dc:
            raise DimensionError("channel must act on BC")
        red, dout = channel.apply_local(rho, [da, db * dc], 1), channel.dout
    return InequalityCheck(f"monotonicity[{kind}]", lhs, _smooth(kind, red, da, dout, eps))


def check_chain_max_upper(rho_abc, dims, eps: float, delta: float, eta: float) -> InequalityCheck:
    """``H_max^{ε+2δ+η}(AB|C) <= H_max^δ(B|C) + H_max^ε(A|BC) + log(2/η^2)``."""
    rho, da, db, dc = _split(rho_abc, dims)
    total = eps + 2 * delta + eta
    _check_eps(total)
    lhs = _smooth("max", rho, da * db, dc, total)
    rho_bc = ptrace(rho, [da, db, dc], [1, 2])
    rhs = _smooth("max", rho_bc, db, dc, delta) + _smooth("max", rho, da, db * dc, eps) + math.log2(2 / eta ** 2)
    return InequalityCheck("chain[max<=max+max]", lhs, rhs)


def check_chain_max_lower(rho_abc, dims, eps: float, delta: float, eta: float) -> InequalityCheck:
    """``H_min^δ(B|C) + H_max^{ε+2δ+2η}(A|BC) - 3 log(2/η^2) <= H_max^ε(AB|C)``."""
    rho, da, db, dc = _split(rho_abc, dims)
    total = eps + 2 * delta + 2 * eta
    _check_eps(total)
    rho_bc = ptrace(rho, [da, db, dc], [1, 2])
    lhs = _smooth("min", rho_bc, db, dc, delta) + _smooth("max", rho, da, db * dc, total) - 3 * math.log2(2 / eta ** 2)
    return InequalityCheck("chain[max>=min+max]", lhs, _smooth("max", rho, da * db, dc, eps))


def check_min_max(rho_ab, da: int, db: int, alpha: float, beta: float) -> InequalityCheck:
    """``H_min^{sin α}(A|B) <= H_max^{sin β}(A|B) + log(1/cos^2(α+β))`` for ``α+β < π/2``."""
    if not (alpha >= 0 and beta >= 0 and alpha + beta < math.pi / 2 - BOUNDARY_TOL):
        raise EntropyError("need α, β >= 0 with α + β < π/2")
    rho = herm(np.asarray(rho_ab, dtype=complex))
    lhs = _smooth("min", rho, da, db, math.sin(alpha))
    rhs = _smooth("max", rho, da, db, math.sin(beta)) - math.log2(math.cos(alpha + beta) ** 2)
    return InequalityCheck("min<=max+log", lhs, rhs)


def check_max_min(rho_ab, da: int, db: int, eps: float) -> InequalityCheck:
    """``H_max^{sqrt(1-ε^4)}(A|B) <= H_min^ε(A|B)`` for ``ε in (0, 1)``."""
    if not 0 < eps < 1:
        raise EntropyError("need 0 < ε < 1")
    rho = herm(np.asarray(rho_ab, dtype=complex))
    big = math.sqrt(1 - eps ** 4)
    return InequalityCheck("max<=min", _smooth("max", rho, da, db, big), _smooth("min", rho, da, db, eps))


def check_duality(rho_ab, da: int, db: int, eps: float, extra: int = 1, seed=None) -> InequalityCheck:
    """``|H_max^ε(A|B) + H_min^ε(A|C)|`` on a purification with an enlarged, rotated ``C``.

    The purifying system here is ``rank ⊗ extra`` dimensional and rotated by a
    random unitary, so it differs from the one used inside
    :func:`hmax_smooth_bipartite`.  At ``ε = 0`` the max-entropy is taken from
    the independent fidelity program :func:`hmax_fidelity`.
    """
    from .matqi import haar_unitary

    rho = herm(np.asarray(rho_ab, dtype=complex))
    m = purify(rho)
    r = m.shape[1]
    dc = r * extra
    iso = np.zeros((dc, r), dtype=complex)
    iso[:r, :r] = np.eye(r)
    iso = haar_unitary(dc, seed) @ iso
    psi = (m @ iso.T).reshape(da, db, dc)
    rho_ac = np.einsum("abc,AbC->acAC", psi, psi.conj()).reshape(da * dc, da * dc)
    hmin_ac = _smooth("min", rho_ac, da, dc, eps)
    hmax_ab = hmax_fidelity(rho, da, db) if eps == 0 else hmax_smooth_bipartite(rho, da, db, eps)
    return InequalityCheck("duality", abs(hmax_ab + hmin_ac), 0.0)


def check_unitary_concavity(rho_ab, da: int, db: int, unitaries, probs, eps: float) -> InequalityCheck:
    """``H_max^{ε sqrt 2}(A|B)_ρ <= H_max^ε(A|B)_ρ̄`` for ``ρ̄ = sum p_i (U_i ⊗ 1) ρ (U_i ⊗ 1)^dag``."""
    if eps * math.sqrt(2) >= 1:
        raise EntropyError("need ε sqrt(2) < 1")
    rho = herm(np.asarray(rho_ab, dtype=complex))
    probs = np.asarray(probs, dtype=float)
    bar = np.zeros_like(rho)
    for p, u in zip(probs / probs.sum(), unitaries):
        ue = np.kron(u, np.eye(db))
        bar += p * ue @ rho @ ue.conj().T
    return InequalityCheck("concavity", _smooth("max", rho, da, db, eps * math.sqrt(2)),
                           _smooth("max", herm(bar), da, db, eps))


def check_max_plus_log(states, probs, da: int, db: int, eps: float) -> InequalityCheck:
    """``H_max^ε(A|B)_ρ̄ <= max_i H_max^ε(A|B)_{ρ_i} + log M``."""
    states = [herm(np.asarray(s, dtype=complex)) for s in states]
    probs = np.asarray(probs, dtype=float)
    probs = probs / probs.sum()
    bar = herm(sum(p * s for p, s in zip(probs, states)))
    worst = max(_smooth("max", s, da, db, eps) for s in states)
    return InequalityCheck("max+log", _smooth("max", bar, da, db, eps), worst + math.log2(len(states)))
