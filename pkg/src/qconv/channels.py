"""Quantum channels in Kraus form, their Choi matrices, dilations and complements.

Conventions
-----------
* Choi matrix ``J = sum_ij |i><j| ⊗ N(|i><j|)`` on ``in ⊗ out`` (unnormalized,
  ``Tr_out J = 1_in``).
* A Stinespring isometry ``U`` maps ``in -> out ⊗ env`` with
  ``U|a> = sum_k K_k|a> ⊗ |k>``; the complementary channel traces out ``out``.
* The erasure flag ``|*>`` is the last basis vector of the output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .matqi import (
    DensityOperator,
    DimensionError,
    Isometry,
    NotPositiveError,
    SystemLabel,
    check_dim,
    herm,
    ptrace,
    support_basis,
)

TP_TOL = 1e-9
RANK_CUTOFF = 1e-9


class ChannelSpecError(ValueError):
    """Raised for malformed channel-spec documents."""


@dataclass(frozen=True)
class ChoiMatrix:
    matrix: np.ndarray
    din: int
    dout: int

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.din * self.dout,) * 2:
            raise DimensionError(f"Choi matrix shape {m.shape} does not match {self.din}x{self.dout}")

    def validate(self, tol: float = TP_TOL) -> None:
        m = herm(self.matrix)
        scale = max(1.0, float(np.linalg.norm(m, 2)))
        if np.linalg.eigvalsh(m)[0] < -tol * scale:
            raise NotPositiveError("Choi matrix is not positive semidefinite")
        tp = ptrace(m, [self.din, self.dout], [0])
        if np.max(np.abs(tp - np.eye(self.din))) > tol * max(1, self.din):
            raise NotPositiveError("Choi matrix violates the trace-preserving condition")


class Channel:
    """CPTP map given by Kraus operators of shape ``(dout, din)``.

    :param kraus: sequence of Kraus operators or an array ``(k, dout, din)``.
    :param in_label: name (or :class:`SystemLabel`) of the input system.
    :param out_label: name (or label) of the output system.
    :param name: descriptive name used in reports.
    """

    def __init__(self, kraus, in_label="A'", out_label="B", name: str = "channel", tol: float = TP_TOL):
        ks = np.array(kraus, dtype=complex)
        if ks.ndim == 2:
            ks = ks[None]
        if ks.ndim != 3 or ks.shape[0] == 0:
            raise DimensionError("need at least one Kraus operator of shape (dout, din)")
        _, dout, din = ks.shape
        check_dim(din * dout)
        res = np.einsum("kji,kjl->il", ks.conj(), ks) - np.eye(din)
        if np.max(np.abs(res), initial=0) > tol:
            raise NotPositiveError(f"Kraus operators are not trace preserving (residual {np.max(np.abs(res)):.3e})")
        ks.setflags(write=False)
        self.kraus = ks
        self.in_label = in_label if isinstance(in_label, SystemLabel) else SystemLabel(str(in_label), din)
        self.out_label = out_label if isinstance(out_label, SystemLabel) else SystemLabel(str(out_label), dout)
        if self.in_label.dim != din or self.out_label.dim != dout:
            raise DimensionError("labels do not match Kraus shape")
        self.name = name

    @property
    def din(self) -> int:
        return self.kraus.shape[2]

    @property
    def dout(self) -> int:
        return self.kraus.shape[1]

    def __repr__(self):
        return f"Channel({self.name}, {self.din}->{self.dout}, kraus={self.kraus.shape[0]})"

    # -- action -----------------------------------------------------------
    def __call__(self, rho: np.ndarray) -> np.ndarray:
        """Apply to a matrix (or stack of matrices) on the input space."""
        rho = np.asarray(rho)
        return np.einsum("kai,...ij,kbj->...ab", self.kraus, rho, self.kraus.conj(), optimize=True)

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        """Heisenberg-picture map ``N^dag``."""
        return np.einsum("kai,...ab,kbj->...ij", self.kraus.conj(), np.asarray(x), self.kraus, optimize=True)

    def apply_local(self, rho: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
        """Apply on tensor factor ``site`` of a multipartite operator."""
        return apply_kraus_on(self.kraus, rho, dims, site)

    # -- representations --------------------------------------------------
    @cached_property
    def choi(self) -> ChoiMatrix:
        # |K_k>> = sum_i |i> ⊗ K_k|i>, i.e. components (i, o) = K_k[o, i]
        vecs = np.transpose(self.kraus, (0, 2, 1)).reshape(self.kraus.shape[0], -1)
        j = np.einsum("ka,kb->ab", vecs, vecs.conj())
        return ChoiMatrix(herm(j), self.din, self.dout)

    @cached_property
    def kraus_rank(self) -> int:
        w = np.linalg.eigvalsh(self.choi.matrix)
        return int(np.sum(w > RANK_CUTOFF * max(1.0, w[-1])))

    @cached_property
    def _dilation(self) -> "Dilation":
        return _build_dilation(self)

    @cached_property
    def _complement(self) -> "Channel":
        u = self._dilation
        return Channel(_complement_kraus(u.kraus), self.in_label, "E", name=f"{self.name}^c")


def apply_kraus_on(kraus: np.ndarray, rho: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    dims = list(dims)
    n = len(dims)
    if kraus.shape[2] != dims[site]:
        raise DimensionError(f"channel input dim {kraus.shape[2]} does not match factor dim {dims[site]}")
    t = np.moveaxis(np.asarray(rho).reshape(dims + dims), [site, n + site], [0, 1])
    others = t.shape[2:]
    t = t.reshape(dims[site], dims[site], -1)
    out = np.einsum("kai,ijr,kbj->abr", kraus, t, kraus.conj(), optimize=True)
    dout = kraus.shape[1]
    out = np.moveaxis(out.reshape((dout, dout) + others), [0, 1], [site, n + site])
    d = math.prod(dims) // dims[site] * dout
    return out.reshape(d, d)


def apply(channel: Channel, state: DensityOperator, acting_on) -> DensityOperator:
    """Apply ``channel`` to the labelled factor ``acting_on`` of ``state``."""
    idx = state.index(acting_on)[0]
    lab = state.factors[idx]
    if lab.dim != channel.din:
        raise DimensionError(f"channel expects dim {channel.din}, factor {lab.name!r} has dim {lab.dim}")
    out = apply_kraus_on(channel.kraus, state.matrix, state.dims, idx)
    factors = list(state.factors)
    factors[idx] = SystemLabel(lab.name, channel.dout)
    return DensityOperator(out, factors, normalized=state.normalized, tol=1e-7)


def choi(channel: Channel) -> ChoiMatrix:
    return channel.choi


def kraus_from_choi(j: ChoiMatrix, name: str = "from_choi", tol: float = TP_TOL) -> Channel:
    j.validate(tol)
    w, v = support_basis(j.matrix, RANK_CUTOFF)
    if w.size == 0:
        raise NotPositiveError("zero Choi matrix")
    ks = (v * np.sqrt(w)).T.reshape(-1, j.din, j.dout).transpose(0, 2, 1)
    return Channel(ks, name=name, tol=max(tol, 1e-8))


# ---------------------------------------------------------------------------
# dilations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dilation:
    """Stinespring isometry ``U: in -> out ⊗ env`` of a channel.

    ``kraus`` is the minimal Kraus set that defines ``U``; ``out_basis`` is
    an isometry from the reduced output (support of ``N(1)``) into the full
    output, equal to the identity when the support is full.
    """

    isometry: Isometry
    kraus: np.ndarray
    env_label: SystemLabel
    out_basis: np.ndarray

    @property
    def U(self) -> np.ndarray:
        return self.isometry.matrix

    @property
    def env_dim(self) -> int:
        return self.env_label.dim

    @property
    def out_dim(self) -> int:
        return self.out_basis.shape[1]

    def residual(self, channel: Channel) -> float:
        """Max deviation of ``Tr_E U X U^dag`` from ``N(X)`` over matrix units."""
        din = channel.din
        units = np.eye(din * din).reshape(din * din, din, din)
        u = self.U
        ux = u[None] @ units @ u.conj().T[None]
        red = ptrace(ux, [self.out_dim, self.env_dim], [0])
        full = self.out_basis[None] @ red @ self.out_basis.conj().T[None]
        return float(np.max(np.abs(full - channel(units))))


def _independent(ks: np.ndarray, tol: float = 1e-9) -> bool:
    m = ks.reshape(ks.shape[0], -1)
    s = np.linalg.svd(m, compute_uv=False)
    return bool(s.size == m.shape[0] and s[-1] > tol * max(1.0, s[0]))


def _build_dilation(channel: Channel) -> Dilation:
    ks = np.asarray(channel.kraus)
    norms = np.linalg.norm(ks.reshape(ks.shape[0], -1), axis=1)
    ks = ks[norms > RANK_CUTOFF]
    if not _independent(ks):
        w, v = support_basis(channel.choi.matrix, RANK_CUTOFF)
        ks = (v * np.sqrt(w)).T.reshape(-1, channel.din, channel.dout).transpose(0, 2, 1)
    # output reduction to the support of N(1)
    out_img = channel(np.eye(channel.din))
    w, basis = support_basis(out_img, RANK_CUTOFF)
    if w.size == channel.dout:
        basis = np.eye(channel.dout, dtype=complex)
    else:
        ks = np.einsum("ob,kbi->koi", basis.conj().T, ks)
    r, dout, din = ks.shape
    u = np.transpose(ks, (1, 0, 2)).reshape(dout * r, din)
    env = "E" if channel.out_label.name != "E" else "B"
    iso = Isometry(u, channel.in_label, [SystemLabel(channel.out_label.name, dout), SystemLabel(env, r)])
    return Dilation(iso, ks, SystemLabel(env, r), basis)


def minimal_dilation(channel: Channel) -> Dilation:
    """Stinespring dilation with ``|E|`` equal to the Choi rank.

    The user's Kraus set is kept when it is already linearly independent,
    so the environment basis follows the channel's definition.
    """
    return channel._dilation


def _complement_kraus(ks: np.ndarray) -> np.ndarray:
    # F_b[k, a] = K_k[b, a]
    return np.transpose(ks, (1, 0, 2))


def complementary(channel: Channel) -> Channel:
    """Complementary channel ``N^c(X) = Tr_B U X U^dag`` for the minimal dilation."""
    return channel._complement


def choi_spectrum(channel: Channel) -> np.ndarray:
    w = np.linalg.eigvalsh(channel.choi.matrix)
    return np.sort(w[w > RANK_CUTOFF * max(1.0, w[-1])])[::-1]


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


def tensor(c1: Channel, c2: Channel) -> Channel:
    check_dim(c1.din * c2.din * c1.dout * c2.dout)
    ks = np.einsum("aij,bkl->abikjl", c1.kraus, c2.kraus)
    k = ks.reshape(c1.kraus.shape[0] * c2.kraus.shape[0], c1.dout * c2.dout, c1.din * c2.din)
    return Channel(k, name=f"{c1.name}⊗{c2.name}", tol=1e-8)


def tensor_power(c: Channel, n: int) -> Channel:
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    out = c
    for _ in range(n - 1):
        out = tensor(out, c)
    out.name = f"{c.name}^{n}"
    return out


def compose(outer: Channel, inner: Channel) -> Channel:
    """``outer ∘ inner``."""
    if outer.din != inner.dout:
        raise DimensionError("composition dimension mismatch")
    ks = np.einsum("aij,bjk->abik", outer.kraus, inner.kraus).reshape(-1, outer.dout, inner.din)
    return Channel(ks, name=f"{outer.name}∘{inner.name}", tol=1e-8)


def link_choi(j_outer: np.ndarray, j_inner: np.ndarray, din: int, dmid: int, dout: int) -> np.ndarray:
    """Choi matrix of ``M ∘ N`` from ``J_N`` (din x dmid) and ``J_M`` (dmid x dout)."""
    a = np.asarray(j_inner).reshape(din, dmid, din, dmid)
    b = np.asarray(j_outer).reshape(dmid, dout, dmid, dout)
    out = np.einsum("imjn,monp->iojp", a, b)
    return out.reshape(din * dout, din * dout)


# ---------------------------------------------------------------------------
# channel zoo
# ---------------------------------------------------------------------------


def _check_prob(x, name):
    if not (isinstance(x, (int, float, np.floating)) and 0 <= float(x) <= 1):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return float(x)


def identity(d: int) -> Channel:
    return Channel(np.eye(d)[None], name=f"id{d}")


def erasure(d: int, q: float) -> Channel:
    """``E_q(rho) = (1-q) rho ⊕ q |*><*|`` with the flag last.

    Kraus order ``sqrt(q)|*><i|`` (i < d) then ``sqrt(1-q)`` times the
    embedding, so the environment of the minimal dilation carries the input
    in its first ``d`` levels and the flag last.
    """
    q = _check_prob(q, "q")
    ks = []
    for i in range(d):
        k = np.zeros((d + 1, d))
        k[d, i] = math.sqrt(q)
        ks.append(k)
    emb = np.zeros((d + 1, d))
    emb[:d, :d] = np.eye(d) * math.sqrt(1 - q)
    ks.append(emb)
    ks = [k for k in ks if np.any(k)]
    return Channel(ks, name=f"erasure(d={d},q={q:g})")


def dephasing(p: float) -> Channel:
    """Qubit dephasing ``Z_p(rho) = (1-p) rho + p Z rho Z``."""
    p = _check_prob(p, "p")
    ks = [math.sqrt(1 - p) * np.eye(2), math.sqrt(p) * np.diag([1.0, -1.0])]
    ks = [k for k in ks if np.any(k)]
    return Channel(ks, name=f"dephasing(p={p:g})")


def weyl_operators(d: int) -> np.ndarray:
    w = np.exp(2j * np.pi / d)
    x = np.roll(np.eye(d), 1, axis=0)
    z = np.diag(w ** np.arange(d))
    return np.array([np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) for a in range(d) for b in range(d)])


def depolarizing(d: int, p: float) -> Channel:
    """``rho -> (1-p) rho + p Tr(rho) 1/d``."""
    p = _check_prob(p, "p")
    ops = weyl_operators(d)
    coeff = np.full(d * d, p / d ** 2)
    coeff[0] += 1 - p
    ks = [math.sqrt(c) * o for c, o in zip(coeff, ops) if c > 0]
    return Channel(ks, name=f"depolarizing(d={d},p={p:g})")


def schur_vectors(s: np.ndarray) -> np.ndarray:
    """Rows ``phi_i`` with ``S_ij = <phi_j|phi_i>``."""
    w, v = support_basis(s, 1e-12)
    return v * np.sqrt(w)


def schur(s) -> Channel:
    """Schur (Hadamard) multiplier ``rho -> S ∘ rho``; S PSD with unit diagonal."""
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionError("Schur multiplier must be square")
    if np.max(np.abs(np.diag(s) - 1)) > 1e-9:
        raise ValueError("Schur multiplier must have unit diagonal")
    if np.max(np.abs(s - s.conj().T)) > 1e-9 or np.linalg.eigvalsh(herm(s))[0] < -1e-9:
        raise NotPositiveError("Schur multiplier must be positive semidefinite")
    phi = schur_vectors(herm(s))
    ks = [np.diag(phi[:, k]) for k in range(phi.shape[1])]
    return Channel(ks, name=f"schur(d={s.shape[0]})")


def constant(sigma) -> Channel:
    """Replacement channel ``rho -> Tr(rho) sigma`` for a qubit-or-larger input of dim ``len(sigma)``."""
    sigma = np.asarray(sigma, dtype=complex)
    return replacement(sigma, sigma.shape[0])


def replacement(sigma, din: int) -> Channel:
    w, v = support_basis(sigma, 1e-12)
    ks = []
    for lam, vec in zip(w, v.T):
        for i in range(din):
            k = np.zeros((sigma.shape[0], din), dtype=complex)
            k[:, i] = math.sqrt(lam) * vec
            ks.append(k)
    return Channel(ks, name="constant")


def random_channel(din: int, dout: int, kraus_rank: int, seed=None) -> Channel:
    """Haar-random isometry ``A' -> B ⊗ K`` cut into ``kraus_rank`` Kraus operators."""
    if dout * kraus_rank < din:
        raise DimensionError(f"need dout * kraus_rank >= din, got {dout} * {kraus_rank} < {din}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dout * kraus_rank, din)) + 1j * rng.standard_normal((dout * kraus_rank, din))
    q, _ = np.linalg.qr(g)
    ks = q.reshape(dout, kraus_rank, din).transpose(1, 0, 2)
    return Channel(ks, name="random", tol=1e-8)


ZOO = {
    "identity": lambda d=2: identity(int(d)),
    "erasure": lambda d=2, q=0.5: erasure(int(d), q),
    "dephasing": lambda p=0.1: dephasing(p),
    "depolarizing": lambda d=2, p=0.1: depolarizing(int(d), p),
    "schur": lambda S: schur(_complex_matrix(S)),
    "constant": lambda sigma: constant(_complex_matrix(sigma)),
    "random": lambda din=2, dout=2, kraus_rank=2, seed=0: random_channel(int(din), int(dout), int(kraus_rank), seed),
}


def make_channel(kind: str, **params) -> Channel:
    """Construct a channel from the zoo by name."""
    if kind not in ZOO:
        raise ValueError(f"unknown channel kind {kind!r}; choose from {sorted(ZOO)}")
    try:
        return ZOO[kind](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind!r}: {exc}") from exc


def _complex_matrix(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a.astype(complex)


# ---------------------------------------------------------------------------
# channel-spec files
# ---------------------------------------------------------------------------


def channel_from_spec(doc: dict) -> Channel:
    """Build a channel from a parsed channel-spec JSON object."""
    if not isinstance(doc, dict):
        raise ChannelSpecError("channel spec must be a JSON object")
    try:
        if "zoo" in doc:
            return make_channel(doc["zoo"], **doc.get("params", {}))
        din, dout = int(doc["din"]), int(doc["dout"])
        ks = np.array(doc["kraus"], dtype=float)
        if ks.ndim != 4 or ks.shape[1:] != (dout, din, 2):
            raise ChannelSpecError(f"kraus array must have shape (k, {dout}, {din}, 2), got {ks.shape}")
        return Channel(ks[..., 0] + 1j * ks[..., 1], name=str(doc.get("name", "channel")))
    except ChannelSpecError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ChannelSpecError(f"malformed channel spec: {exc}") from exc


def channel_to_spec(channel: Channel) -> dict:
    ks = np.stack([channel.kraus.real, channel.kraus.imag], axis=-1)
    return {"name": channel.name, "din": channel.din, "dout": channel.dout, "kraus": ks.tolist()}


def load_channel(path: str) -> Channel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ChannelSpecError(f"cannot read channel spec {path!r}: {exc}") from exc
    return channel_from_spec(doc)
