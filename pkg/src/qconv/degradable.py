"""Degradability certificates and swap-symmetric dilations.

* :func:`certify_degradability` decides degradability by minimizing the
  largest eigenvalue gap ``t`` between ``J(M∘N)`` and ``J(N^c)`` over
  channels ``M``; the minimum is a quantitative certificate.
* :func:`symmetrized_dilation` turns a degrading map into dilations
  ``U: A' -> B⊗E``, ``V: B -> F⊗E'`` with ``(X_F ⊗ SWAP_{EE'}) VU = VU``.
* :func:`type_i_lift` attaches a maximally mixed qubit to the output so the
  symmetry holds with trivial ``X_F``.
* :func:`extract_symmetric_channel` and :func:`decompose_via_symmetric`
  factor ``VU`` through a swap-symmetric isometry ``W: G' -> E⊗E'``.

Output order of ``VU`` is always ``F, E, E'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sdp
from .channels import (
    Channel,
    ChoiMatrix,
    complementary,
    erasure,
    kraus_from_choi,
    link_choi,
    minimal_dilation,
)
from .matqi import (
    DimensionError,
    herm,
    isometry_residual,
    ptrace,
    swap_operator,
)

DEGRADABLE_TOL = 1e-6
NOT_DEGRADABLE_TOL = 1e-4

DEGRADABLE = "Degradable"
ANTIDEGRADABLE = "AntiDegradable"
SYMMETRIC = "Symmetric"
NEITHER = "Neither"
INCONCLUSIVE = "Inconclusive"


class ConstructionError(RuntimeError):
    """Raised when a dilation identity fails beyond tolerance."""


# ---------------------------------------------------------------------------
# degradability
# ---------------------------------------------------------------------------


@dataclass
class SlackResult:
    slack: float
    choi: np.ndarray  # polished Choi matrix of the connecting map
    residual: float  # ||J(M∘source) - J(target)|| after polishing
    solution: object


@dataclass
class DegradabilityCertificate:
    verdict: str
    degrading_choi: np.ndarray | None
    residual: float
    min_slack: float
    degrade: SlackResult
    antidegrade: SlackResult
    dims: tuple[int, int]  # (|B|, |E|)

    def degrading_map(self) -> Channel | None:
        if self.degrading_choi is None:
            return None
        return kraus_from_choi(ChoiMatrix(self.degrading_choi, *self.dims), "degrading", tol=1e-7)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "degrade_slack": self.degrade.slack,
            "antidegrade_slack": self.antidegrade.slack,
            "residual": self.residual,
            "dims": list(self.dims),
        }


def _polish(j: np.ndarray, din: int, dout: int) -> np.ndarray:
    """Nearest-ish valid Choi matrix: clip negative eigenvalues, then restore TP."""
    w, v = np.linalg.eigh(herm(j))
    j = (v * np.clip(w, 0, None)) @ v.conj().T
    t = ptrace(j, [din, dout], [0])
    tw, tv = np.linalg.eigh(herm(t))
    inv_sqrt = (tv / np.sqrt(np.clip(tw, 1e-300, None))) @ tv.conj().T
    k = np.kron(inv_sqrt, np.eye(dout))
    return herm(k @ j @ k.conj().T)


def connecting_slack(source: Channel, target: Channel) -> SlackResult:
    """Minimize ``t`` with ``-t 1 <= J(M∘source) - J(target) <= t 1`` over channels ``M``.

    ``source`` and ``target`` share an input; ``M`` maps the output of
    ``source`` to the output of ``target``.
    """
    if source.din != target.din:
        raise DimensionError("channels must share their input")
    din, dm, dout = source.din, source.dout, target.dout
    js, jt = source.choi.matrix, target.choi.matrix
    p = sdp.SdpProblem("degradability_slack")
    jm = p.hermitian("J", dm * dout, psd=True)
    t = p.scalar("t")
    p.add_constraint("tp", [(jm, sdp.ptrace_map([dm, dout], [0]))], "==", const=-np.eye(dm))

    def comp(x):
        return np.array([link_choi(xx, js, din, dm, dout) for xx in x])

    eye = np.eye(din * dout)
    p.add_constraint("upper", [(t, sdp.scalar_times(eye)), (jm, sdp.scaled(comp, -1.0))], ">=", const=jt)
    p.add_constraint("lower", [(t, sdp.scalar_times(eye)), (jm, comp)], ">=", const=-jt)
    p.minimize([(t, sdp.scalar_id)])
    sol = sdp.solve(p, raise_on_fail=True)
    j = _polish(sol["J"], dm, dout)
    resid = float(np.linalg.norm(link_choi(j, js, din, dm, dout) - jt, 2))
    return SlackResult(max(sol.primal_value, 0.0), j, resid, sol)


def certify_degradability(channel: Channel) -> DegradabilityCertificate:
    """Degradable / AntiDegradable / Symmetric / Neither verdict with certificates.

    ``t* <= 1e-6`` counts as yes, ``t* > 1e-4`` as a certified no; anything in
    between makes the verdict ``Inconclusive``.
    """
    comp = complementary(channel)
    deg = connecting_slack(channel, comp)
    anti = connecting_slack(comp, channel)

    def yes(r):
        return r.slack <= DEGRADABLE_TOL

    def no(r):
        return r.slack > NOT_DEGRADABLE_TOL

    if yes(deg) and yes(anti):
        verdict = SYMMETRIC
    elif yes(deg) and no(anti):
        verdict = DEGRADABLE
    elif yes(anti) and no(deg):
        verdict = ANTIDEGRADABLE
    elif no(deg) and no(anti):
        verdict = NEITHER
    else:
        verdict = INCONCLUSIVE
    cert = DegradabilityCertificate(
        verdict,
        deg.choi if yes(deg) else None,
        deg.residual if yes(deg) else anti.residual,
        min(deg.slack, anti.slack),
        deg,
        anti,
        (channel.dout, comp.dout),
    )
    return cert


# ---------------------------------------------------------------------------
# type I dilations
# ---------------------------------------------------------------------------


@dataclass
class TypeIDilation:
    """Dilations ``U: A' -> B⊗E`` and ``V: B -> F⊗E'`` with a symmetry ``X_F``.

    Invariant: ``(X_F ⊗ SWAP_{EE'}) VU = sign · VU`` where ``VU`` is ordered
    ``F, E, E'``.
    """

    U: np.ndarray
    V: np.ndarray
    X_F: np.ndarray
    sign: int
    din: int
    dB: int
    dE: int
    dF: int

    def VU(self) -> np.ndarray:
        """``A' -> F ⊗ E ⊗ E'``."""
        vu = np.kron(self.V, np.eye(self.dE)) @ self.U  # F E' E
        d = vu.shape[1]
        t = vu.reshape(self.dF, self.dE, self.dE, d).transpose(0, 2, 1, 3)
        return t.reshape(self.dF * self.dE * self.dE, d)

    def swap_full(self) -> np.ndarray:
        return np.kron(self.X_F, swap_operator(self.dE))

    def symmetry_residual(self) -> float:
        vu = self.VU()
        return float(np.linalg.norm(self.swap_full() @ vu - self.sign * vu, 2))

    def involution_residual(self) -> float:
        return float(np.linalg.norm(self.X_F @ self.X_F - np.eye(self.dF), 2))

    def isometry_residuals(self) -> tuple[float, float]:
        return isometry_residual(self.U), isometry_residual(self.V)

    def complement_residual(self, channel: Channel) -> float:
        """Max deviation of ``Tr_{FE'} VU X (VU)^dag`` from ``N^c(X)`` on matrix units."""
        comp = complementary(channel)
        vu = self.VU()
        units = np.eye(self.din ** 2).reshape(-1, self.din, self.din)
        out = vu[None] @ units @ vu.conj().T[None]
        red = ptrace(out, [self.dF, self.dE, self.dE], [1])
        return float(np.max(np.abs(red - comp(units))))

    def channel_residual(self, channel: Channel) -> float:
        """Max deviation of ``Tr_E U X U^dag`` from ``N(X)`` on matrix units."""
        units = np.eye(self.din ** 2).reshape(-1, self.din, self.din)
        out = self.U[None] @ units @ self.U.conj().T[None]
        red = ptrace(out, [self.dB, self.dE], [0])
        return float(np.max(np.abs(red - channel(units))))


def _isometry_from_kraus(ks: np.ndarray) -> np.ndarray:
    """``U|a> = sum_k K_k|a> ⊗ |k>`` as a matrix (out·env x in)."""
    r, dout, din = ks.shape
    return np.transpose(ks, (1, 0, 2)).reshape(dout * r, din)


def symmetrized_dilation(channel: Channel, degrading_choi, tol: float = 1e-7) -> TypeIDilation:
    """Swap-symmetric dilation built from a degrading map.

    With ``V0`` a dilation of the degrading map ``M: B -> E'``,
    ``W = (V0 U ⊗ |0>_G + SWAP_{EE'} V0 U ⊗ |1>_G)/sqrt(2)`` is another dilation
    of ``N^c``, so ``W = (V ⊗ 1_E) U`` for an isometry ``V: B -> F⊗E'`` with
    ``F = F0 ⊗ G``; the symmetry is ``X_F = 1_{F0} ⊗ σ_x``.
    """
    dil = minimal_dilation(channel)
    u = dil.U
    dB, dE = dil.out_dim, dil.env_dim
    din = channel.din
    j = np.asarray(degrading_choi.matrix if isinstance(degrading_choi, ChoiMatrix) else degrading_choi)
    if dil.out_basis.shape[0] != dil.out_basis.shape[1] or not np.allclose(dil.out_basis, np.eye(dB)):
        # restrict the degrading map to the reduced output space
        ob = dil.out_basis
        k = np.kron(ob.conj().T, np.eye(dE))
        j = k @ j @ k.conj().T
    m = kraus_from_choi(ChoiMatrix(herm(j), dB, dE), "degrading", tol=1e-6)
    v0 = _isometry_from_kraus(np.asarray(m.kraus))  # B -> E' ⊗ F0
    dF0 = m.kraus.shape[0]
    # V0 U : A' -> (E' F0) ⊗ E, reorder to F0 E E'
    v0u = np.kron(v0, np.eye(dE)) @ u
    v0u = v0u.reshape(dE, dF0, dE, din).transpose(1, 2, 0, 3).reshape(dF0 * dE * dE, din)
    sw = np.kron(np.eye(dF0), swap_operator(dE))
    halves = [x.reshape(dF0, dE * dE, din) for x in (v0u, sw @ v0u)]
    w = np.stack(halves, axis=1).reshape(dF0 * 2 * dE * dE, din) / math.sqrt(2)  # F = F0 ⊗ G, then E E'
    dF = 2 * dF0
    # solve W = (V ⊗ 1_E) U on B:  W_e = V U_e  where U_e = (1 ⊗ <e|) U
    u_blocks = u.reshape(dB, dE, din)  # [b, e, a]
    w_blocks = w.reshape(dF, dE, dE, din).transpose(0, 2, 1, 3)  # [f, e', e, a]
    u_stack = u_blocks.reshape(dB, dE * din)
    w_stack = w_blocks.reshape(dF * dE, dE * din)
    v = w_stack @ np.linalg.pinv(u_stack)
    # nearest isometry (polar factor) absorbs the residual error of M
    uu, _, vh = np.linalg.svd(v, full_matrices=False)
    v = uu @ vh
    xf = np.kron(np.eye(dF0), np.array([[0.0, 1.0], [1.0, 0.0]]))
    dilation = TypeIDilation(u, v, xf, +1, din, dB, dE, dF)
    fact = float(np.linalg.norm(dilation.VU() - w, 2))
    if fact > tol:
        raise ConstructionError(f"W = VU factorization residual {fact:.3e} exceeds {tol:.1e}")
    return dilation


def schur_direct_dilation(s) -> TypeIDilation:
    """``U|i> = |i>|φ_i>``, ``V|i> = |i>|φ_i>`` for a Schur multiplier channel.

    ``VU|i> = |i>_F |φ_i>_E |φ_i>_{E'}`` is swap symmetric with ``X_F = 1``.
    """
    from .channels import schur_vectors

    s = herm(np.asarray(s, dtype=complex))
    phi = schur_vectors(s)  # rows φ_i
    d, r = phi.shape
    u = np.zeros((d * r, d), dtype=complex)
    for i in range(d):
        u[i * r:(i + 1) * r, i] = phi[i]
    return TypeIDilation(u, u.copy(), np.eye(d), +1, d, d, r, d)


def erasure_guessed_dilation(d: int, q: float, phase: complex = 1.0) -> TypeIDilation:
    """Hand-built dilations of the erasure channel and its degrading map.

    ``U|φ> = sqrt(1-q)|φ>_B|*>_E + e^{iα} sqrt(q)|*>_B|φ>_E`` and
    ``V|*> = |*>_F|*>_{E'}``, ``V|φ> = sqrt(1-t)|φ>_F|*>_{E'} + sqrt(t)|*>_F|φ>_{E'}``
    with ``t = q/(1-q)``, so the degrading map transmits with probability ``t``.
    For ``e^{iα} = 1`` the symmetry holds with ``X_F = 1``; for
    ``e^{iα} = -1`` with ``X_F = 2|*><*| - 1``.
    """
    if not 0 <= q <= 0.5:
        raise ValueError("the erasure channel is degradable only for q <= 1/2")
    t = q / (1 - q)
    D = d + 1
    star = d
    u = np.zeros((D, D, d), dtype=complex)  # [b, e, a]
    for a in range(d):
        u[a, star, a] += math.sqrt(1 - q)
        u[star, a, a] += phase * math.sqrt(q)
    v = np.zeros((D, D, D), dtype=complex)  # [f, e', b]
    v[star, star, star] = 1
    for b in range(d):
        v[b, star, b] += math.sqrt(1 - t)
        v[star, b, b] += math.sqrt(t)
    xf = np.eye(D) if abs(phase - 1) < 1e-12 else 2 * np.diag(np.eye(D)[star]) - np.eye(D)
    dil = TypeIDilation(u.reshape(D * D, d), v.reshape(D * D, D), xf, +1, d, D, D, D)
    res = dil.swap_full() @ dil.VU()
    if np.linalg.norm(res + dil.VU(), 2) < 1e-9:
        dil.sign = -1
    return dil


def channel_from_dilation(v: np.ndarray, dout: int, denv: int, name: str = "dilated") -> Channel:
    """Channel ``X -> Tr_env V X V^dag`` for ``V`` ordered ``(env, out)``."""
    din = v.shape[1]
    ks = np.asarray(v).reshape(denv, dout, din)
    return Channel(ks, name=name, tol=1e-8)


def augmented_erasure(d: int, e: float) -> Channel:
    """Erasure with probability ``e`` on ``C^d`` that leaves the flag ``|*>`` fixed.

    Input and output are both ``C^{d+1}`` with the flag last.
    """
    base = np.asarray(erasure(d, e).kraus)
    ks = [np.hstack([k, np.zeros((d + 1, 1))]) for k in base]
    flag = np.zeros((d + 1, d + 1))
    flag[d, d] = 1
    ks.append(flag)
    return Channel(ks, name=f"erasure+flag(d={d},e={e:g})")


def erasure_degrading_map(d: int, q: float) -> Channel:
    """Degrading map of ``erasure(d, q)`` read off the hand-built dilation ``V``.

    It transmits with probability ``t = q/(1-q)``, i.e. it erases with
    probability ``(1-2q)/(1-q)``.
    """
    dil = erasure_guessed_dilation(d, q)
    return channel_from_dilation(dil.V, d + 1, d + 1, name=f"degrade(erasure q={q:g})")


def pinched_choi(j: np.ndarray, din: int, dout: int, blocks) -> np.ndarray:
    """Choi matrix of ``M ∘ P`` with ``P`` the pinching onto the given input blocks.

    Degrading maps are only determined on the span of the channel's outputs;
    pinching removes the free coherences between blocks.
    """
    lab = np.empty(din, dtype=int)
    for k, blk in enumerate(blocks):
        lab[list(blk)] = k
    same = (lab[:, None] == lab[None, :]).astype(float)
    return np.asarray(j) * np.kron(same, np.ones((dout, dout)))


# ---------------------------------------------------------------------------
# type I lift
# ---------------------------------------------------------------------------


@dataclass
class TypeILift:
    channel: Channel
    U: np.ndarray  # A' -> (B B0) ⊗ (E E0)
    V: np.ndarray  # (B B0) -> F ⊗ (E' E0')
    dilation: TypeIDilation

    def swap_residual(self) -> float:
        return self.dilation.symmetry_residual()

    def sym_subspace_residual(self) -> float:
        """Distance of ``ṼŨ`` from ``F ⊗ Sym²(E E0)``."""
        dl = self.dilation
        dee = dl.dE
        proj = (np.eye(dee * dee) + swap_operator(dee)) / 2
        p = np.kron(np.eye(dl.dF), proj)
        vu = dl.VU()
        return float(np.linalg.norm(p @ vu - vu, 2))


def type_i_lift(channel: Channel, dilation: TypeIDilation) -> TypeILift:
    """Lift a degradable channel to one with a trivially symmetric dilation.

    ``Ũ|φ> = U|φ> ⊗ (|01> + |10>)/sqrt(2)`` on ``B0 E0`` and
    ``Ṽ = (P_+ ⊗ 1 + P_- ⊗ Z_{E0'})(V ⊗ 1_{B0 -> E0'})`` with ``P_±`` the
    eigenprojectors of ``sign · X_F``.
    """
    xf = dilation.sign * dilation.X_F
    if np.linalg.norm(xf @ xf - np.eye(dilation.dF), 2) > 1e-8 or np.linalg.norm(xf - xf.conj().T, 2) > 1e-8:
        raise ConstructionError("X_F must be a Hermitian involution")
    p_plus = (np.eye(dilation.dF) + xf) / 2
    p_minus = (np.eye(dilation.dF) - xf) / 2
    dB, dE, dF, din = dilation.dB, dilation.dE, dilation.dF, dilation.din
    bell = np.array([0, 1, 1, 0]) / math.sqrt(2)  # |01> + |10> on B0 E0
    # Ũ: A' -> B ⊗ E ⊗ B0 ⊗ E0, reorder to (B B0) (E E0)
    ut = np.kron(dilation.U, bell[:, None])  # [(b e)(b0 e0), a]
    ut = ut.reshape(dB, dE, 2, 2, din).transpose(0, 2, 1, 3, 4).reshape(dB * 2 * dE * 2, din)
    # Ṽ: B ⊗ B0 -> F ⊗ E' ⊗ E0'
    z = np.diag([1.0, -1.0])
    ctrl = np.kron(np.kron(p_plus, np.eye(dE)), np.eye(2)) + np.kron(np.kron(p_minus, np.eye(dE)), z)
    vt = ctrl @ np.kron(dilation.V, np.eye(2))  # [(f e' e0'), (b b0)]
    lifted = TypeIDilation(ut, vt, np.eye(dF), +1, din, 2 * dB, 2 * dE, dF)
    ks = ut.reshape(2 * dB, 2 * dE, din).transpose(1, 0, 2)
    lch = Channel(ks, name=f"lift({channel.name})", tol=1e-8)
    return TypeILift(lch, ut, vt, lifted)


# ---------------------------------------------------------------------------
# symmetric-channel extraction
# ---------------------------------------------------------------------------


@dataclass
class SymmetricExtraction:
    """``W: G' -> E ⊗ E'`` with ``SWAP_{EE'} W = sign · W``.

    ``G_basis`` spans the support of ``ψ0^{AF}`` (columns are the Schmidt
    vectors ``g_i``), ``chi`` is the purification ``sum_i sqrt(p_i) |g_i>|i>``
    written in that basis (so it lives on ``G ⊗ G'``).
    """

    W: np.ndarray
    G_basis: np.ndarray
    schmidt: np.ndarray
    chi: np.ndarray
    sign: int
    test_state: np.ndarray
    dA: int

    @property
    def dG(self) -> int:
        return self.G_basis.shape[1]

    def swap_residual(self, dE: int) -> float:
        return float(np.linalg.norm(swap_operator(dE) @ self.W - self.sign * self.W, 2))

    def isometry_residual(self) -> float:
        return isometry_residual(self.W)


def _apply_dilation(dilation: TypeIDilation, phi: np.ndarray, dA: int) -> np.ndarray:
    """``(1_A ⊗ VU)|φ>`` on ``A F E E'`` for ``φ`` on ``A A'``."""
    vu = dilation.VU()
    m = np.asarray(phi).reshape(dA, dilation.din)
    return (m @ vu.T).reshape(-1)


def extract_symmetric_channel(dilation: TypeIDilation, test_state=None, cutoff: float = 1e-8) -> SymmetricExtraction:
    """Swap-symmetric isometry from the Schmidt decomposition of ``ψ0 = VU φ0``.

    Requires ``X_F = ±1`` (apply :func:`type_i_lift` first otherwise).  The
    default test state is the maximally entangled state on ``A A'``.
    """
    xf = dilation.X_F
    triv = [s for s in (1, -1) if np.linalg.norm(xf - s * np.eye(dilation.dF), 2) < 1e-8]
    if not triv:
        raise ConstructionError("extraction needs a dilation with X_F = ±1; lift it first")
    sign = dilation.sign * triv[0]
    din = dilation.din
    if test_state is None:
        test_state = np.eye(din).reshape(-1) / math.sqrt(din)
    phi0 = np.asarray(test_state, dtype=complex).reshape(-1)
    if phi0.size % din:
        raise DimensionError("test state must live on A ⊗ A'")
    dA = phi0.size // din
    sv = np.linalg.svd(phi0.reshape(dA, din), compute_uv=False)
    if np.sum(sv > cutoff) < din:
        raise ConstructionError("test state must have full Schmidt rank |A'|")
    dF, dE = dilation.dF, dilation.dE
    psi0 = _apply_dilation(dilation, phi0, dA).reshape(dA * dF, dE * dE)
    uu, ss, vh = np.linalg.svd(psi0, full_matrices=False)
    keep = ss > cutoff * ss[0]
    g = uu[:, keep]
    p = ss[keep] ** 2
    w = vh[keep].T  # columns |h_i> in E ⊗ E'
    chi = np.diag(np.sqrt(p)).reshape(-1)  # in basis g_i ⊗ |i>
    ext = SymmetricExtraction(w, g, p, chi, sign, phi0, dA)
    if ext.swap_residual(dE) > 1e-7:
        # the observed sign may differ from the dilation's bookkeeping
        flipped = float(np.linalg.norm(swap_operator(dE) @ w + sign * w, 2))
        if flipped < 1e-7:
            ext.sign = -sign
        else:
            raise ConstructionError(f"extracted isometry is not swap symmetric ({ext.swap_residual(dE):.3e})")
    return ext


@dataclass
class SymmetricDecomposition:
    W_hat: np.ndarray  # G -> A ⊗ F
    xi: np.ndarray  # on G ⊗ G'
    residual: float


def decompose_via_symmetric(ext: SymmetricExtraction, dilation: TypeIDilation, phi) -> SymmetricDecomposition:
    """Write ``(1 ⊗ VU)|φ> = (Ŵ ⊗ W)|ξ>`` with ``Ŵ: G -> AF`` an isometry.

    ``φ = (K ⊗ 1)φ0`` with ``K = M M0^{-1}`` (coefficient matrices), so
    ``ψ = ((K ⊗ 1_F) g ⊗ W) χ``; the polar decomposition
    ``(K ⊗ 1_F) g = Ŵ T`` gives ``ξ = (T ⊗ 1) χ``.
    """
    din, dA, dF = dilation.din, ext.dA, dilation.dF
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.size != dA * din:
        raise DimensionError("input state must live on A ⊗ A'")
    m0 = ext.test_state.reshape(dA, din)
    m = phi.reshape(dA, din)
    # K m0 = m on the row space of m0 (full Schmidt rank: m0 has rank din)
    k = m @ np.linalg.pinv(m0)
    x = np.kron(k, np.eye(dF)) @ ext.G_basis
    uu, ss, vh = np.linalg.svd(x, full_matrices=False)
    w_hat = uu @ vh
    t = vh.conj().T @ np.diag(ss) @ vh
    g = ext.dG
    xi = (t @ ext.chi.reshape(g, g)).reshape(-1)
    psi = _apply_dilation(dilation, phi, dA)
    recon = np.kron(w_hat, ext.W) @ xi
    return SymmetricDecomposition(w_hat, xi, float(np.linalg.norm(psi - recon)))


# ---------------------------------------------------------------------------
# coherent information through the symmetric dilation
# ---------------------------------------------------------------------------


def dilated_state(dilation: TypeIDilation, rho: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Pure ``ψ = (1 ⊗ VU)φ`` on ``A F E E'`` for a purification ``φ`` of ``rho``."""
    from .matqi import purify

    mat = purify(herm(rho))  # rows A', cols A
    dA = mat.shape[1]
    phi = mat.T.reshape(-1)
    psi = _apply_dilation(dilation, phi, dA)
    return psi, [dA, dilation.dF, dilation.dE, dilation.dE]


def degradable_identity(dilation: TypeIDilation, channel: Channel, rho: np.ndarray) -> tuple[float, float]:
    """``(I(A>B) - S(F|E'), S(AF|E'))`` on ``ψ = (1 ⊗ VU)φ``.

    Both vanish for a swap-symmetric dilation of a degradable channel.
    """
    from .entropies import coherent_information, conditional_entropy

    psi, dims = dilated_state(dilation, rho)
    full = np.outer(psi, psi.conj())
    s_f_ep = conditional_entropy(full, dims, [1], [3])
    s_af_ep = conditional_entropy(full, dims, [0, 1], [3])
    return coherent_information(channel, rho) - s_f_ep, s_af_ep


def conditional_entropy_f_given_ep(dilation: TypeIDilation):
    """Callable ``rho -> S(F|E')`` used to re-check ``Q^(1)`` optimizers."""
    from .entropies import conditional_entropy

    def f(rho):
        psi, dims = dilated_state(dilation, rho)
        return conditional_entropy(np.outer(psi, psi.conj()), dims, [1], [3])

    return f
