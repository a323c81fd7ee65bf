"""Finite-blocklength converse bounds, code metrics and decoupling checks.

Bound evaluators return a :class:`ConverseBoundReport` listing every additive
term of the bound by name, so the instantiated constants are visible next
to the leading ``n Q^(1)`` term.  All logarithms are base 2; ``ln`` is
natural.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .channels import Channel, complementary
from .entropies import hmin_bipartite, hmin_smooth_bipartite, q1 as q1_optimize
from .matqi import (
    DensityOperator,
    DimensionError,
    PureState,
    as_matrix,
    check_dim,
    fidelity,
    generalized_inverse_lognorm,
    haar_projector,
    herm,
    partial_trace,
    ptrace,
    random_density,
    support_basis,
    symmetric_projector,
    trace_norm,
)

INV_SQRT2 = 1 / math.sqrt(2)
BOUNDARY_TOL = 1e-12
THM3_CONST = 6.0


class PreconditionError(ValueError):
    """A bound or metric was requested outside its range of validity."""


def _log2(x: float) -> float:
    return math.log2(x)


# ---------------------------------------------------------------------------
# bound reports
# ---------------------------------------------------------------------------


@dataclass
class ConverseBoundReport:
    bound_kind: str
    n: int
    eps: float
    delta: float
    param_name: str | None
    param: float | None
    q1: float
    dimA: int | None
    mu: float | None
    terms: list[tuple[str, float]] = field(default_factory=list)

    @property
    def total(self) -> float:
        return math.fsum(v for _, v in self.terms)

    @property
    def rate(self) -> float:
        return self.total / self.n

    def term(self, name: str) -> float:
        for k, v in self.terms:
            if k == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "bound_kind": self.bound_kind,
            "n": self.n,
            "eps": self.eps,
            "delta": self.delta,
            "param_name": self.param_name,
            "param": self.param,
            "q1": self.q1,
            "dimA": self.dimA,
            "mu": self.mu,
            "terms": [{"name": k, "value": v} for k, v in self.terms],
            "total": self.total,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    CSV_FIELDS = ("bound_kind", "n", "eps", "delta", "param", "q1", "dimA", "mu", "total")

    def csv_row(self) -> list:
        d = self.to_dict()
        return [d[k] for k in self.CSV_FIELDS]


def _check_common(q1: float, n: int, mu: float | None = None) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise PreconditionError("n must be a positive integer")
    if q1 < 0 or not math.isfinite(q1):
        raise PreconditionError("q1 must be a finite non-negative number")
    if mu is not None and (mu < 0 or not math.isfinite(mu)):
        raise PreconditionError("mu must be a finite non-negative number")


def _aep_term(mu: float, n: int, dimA: int, param: float) -> float:
    # ln(64 n^{|A|^2} / p^2), expanded to avoid overflow for large n
    ln_arg = math.log(64) + dimA ** 2 * math.log(n) - 2 * math.log(param)
    return mu * math.sqrt(n * ln_arg)


def weak_bound(q1: float, n: int, eps: float) -> ConverseBoundReport:
    """Weak converse ``log N <= (n Q^(1) + 1) / (1 - 2ε)`` for degradable channels."""
    _check_common(q1, n)
    if not 0 <= eps < 0.5:
        raise PreconditionError("epsilon must be in [0, 0.5) (weak converse)")
    s = 1 / (1 - 2 * eps)
    terms = [("n*q1/(1-2eps)", n * q1 * s), ("1/(1-2eps)", s)]
    return ConverseBoundReport("Weak", n, eps, 0.0, None, None, q1, None, None, terms)


def thm1_bound(q1: float, dimA: int, n: int, eps: float, mu: float) -> ConverseBoundReport:
    """Pretty strong converse for entanglement generation.

    ``n Q^(1) + μ sqrt(n ln(64 n^{|A|^2}/λ^2)) + 3|A|^2 log n + 5 + 5 log(1/λ)``
    with ``λ = (1/sqrt(2) - ε)/4``.
    """
    _check_common(q1, n, mu)
    if not 0 < eps or eps >= INV_SQRT2 - BOUNDARY_TOL:
        raise PreconditionError(f"epsilon must be in (0, {INV_SQRT2:.4f}) (Thm 1)")
    if dimA < 1:
        raise PreconditionError("dimA must be positive")
    lam = (INV_SQRT2 - eps) / 4
    terms = [
        ("n*q1", n * q1),
        ("mu*sqrt(n*ln(64*n^(A^2)/lambda^2))", _aep_term(mu, n, dimA, lam)),
        ("3*A^2*log(n)", 3 * dimA ** 2 * _log2(n)),
        ("constant", 5.0),
        ("5*log(1/lambda)", 5 * _log2(1 / lam)),
    ]
    return ConverseBoundReport("Thm1", n, eps, 0.0, "lambda", lam, q1, dimA, mu, terms)


def thm2_bound(q1: float, dimA: int, n: int, eps: float, delta: float, mu: float) -> ConverseBoundReport:
    """Pretty strong converse for private classical codes.

    ``n Q^(1) + μ sqrt(n ln(64 n^{|A|^2}/η^2)) + 3|A|^2 log n + 9 + 11 log(1/η)``
    with ``η = (1/sqrt(2) - ε - 2δ)/6``.
    """
    _check_common(q1, n, mu)
    if eps < 0 or delta < 0:
        raise PreconditionError("epsilon and delta must be non-negative")
    if eps + 2 * delta >= INV_SQRT2 - BOUNDARY_TOL:
        raise PreconditionError(f"epsilon + 2*delta must be < {INV_SQRT2:.4f} (Thm 2)")
    if dimA < 1:
        raise PreconditionError("dimA must be positive")
    eta = (INV_SQRT2 - eps - 2 * delta) / 6
    terms = [
        ("n*q1", n * q1),
        ("mu*sqrt(n*ln(64*n^(A^2)/eta^2))", _aep_term(mu, n, dimA, eta)),
        ("3*A^2*log(n)", 3 * dimA ** 2 * _log2(n)),
        ("constant", 9.0),
        ("11*log(1/eta)", 11 * _log2(1 / eta)),
    ]
    return ConverseBoundReport("Thm2", n, eps, delta, "eta", eta, q1, dimA, mu, terms)


def thm3_bound(q1: float, dimA: int, n: int, eps: float, mu: float, logNE_symmetric: float,
               const: float = THM3_CONST) -> ConverseBoundReport:
    """Strong converse reduced to the associated symmetric channel.

    ``n Q^(1) + μ sqrt(n ln(64 n^{|A|^2}/λ^2)) + 8 log(1/λ) + O(log n) + log N_E(n, 1-λ|M)``
    with ``λ = (1-ε)/5``.  The ``O(log n)`` term is instantiated as
    ``3|A|^2 log n + const`` and reported as two separate terms.
    """
    _check_common(q1, n, mu)
    if not 0 < eps < 1:
        raise PreconditionError("epsilon must be in (0, 1) (Thm 3)")
    if logNE_symmetric < 0 or not math.isfinite(logNE_symmetric):
        raise PreconditionError("log N_E of the symmetric channel must be finite and non-negative")
    lam = (1 - eps) / 5
    terms = [
        ("n*q1", n * q1),
        ("mu*sqrt(n*ln(64*n^(A^2)/lambda^2))", _aep_term(mu, n, dimA, lam)),
        ("8*log(1/lambda)", 8 * _log2(1 / lam)),
        ("O(log n): 3*A^2*log(n)", 3 * dimA ** 2 * _log2(n)),
        ("O(log n): constant", float(const)),
        ("log N_E(n,1-lambda|M)", float(logNE_symmetric)),
    ]
    return ConverseBoundReport("Thm3", n, eps, 0.0, "lambda", lam, q1, dimA, mu, terms)


# ---------------------------------------------------------------------------
# the constant mu
# ---------------------------------------------------------------------------


@dataclass
class MuEstimate:
    value: float
    raw: float
    cap: float
    convention: str
    state: np.ndarray


def mu_at(channel: Channel, rho: np.ndarray) -> float:
    """``μ_B + μ_C`` for the AEP applied to ``H_max(F|E')`` at input ``rho``.

    ``ψ^{E'} = N^c(ρ)`` and the purifying system has the spectrum of ``N(ρ)``.
    """
    comp = complementary(channel)
    return generalized_inverse_lognorm(comp(rho)) + generalized_inverse_lognorm(channel(rho))


def default_mu(channel: Channel, convention: str = "optimizer", rho=None, samples: int = 200,
               seed: int = 0) -> MuEstimate:
    """Default ``μ`` for the thm1/thm2 bound reports, capped at ``2 log(|B||E|)``.

    ``optimizer`` evaluates at the ``Q^(1)`` optimizer (or at ``rho`` when
    given); ``uniform`` takes the worst case over the optimizer, the
    maximally mixed input and ``samples`` random inputs.
    """
    comp = complementary(channel)
    cap = 2 * _log2(channel.dout * comp.dout)
    if rho is None:
        rho = q1_optimize(channel, restarts=5, seed=seed, grid=False).state
    rho = herm(np.asarray(rho, dtype=complex))
    if convention == "optimizer":
        raw = mu_at(channel, rho)
        state = rho
    elif convention == "uniform":
        cands = [rho, np.eye(channel.din) / channel.din]
        rng = np.random.default_rng(seed)
        cands += [random_density(channel.din, rng) for _ in range(samples)]
        vals = [mu_at(channel, c) for c in cands]
        k = int(np.argmax(vals))
        raw, state = vals[k], cands[k]
    else:
        raise ValueError(f"unknown mu convention {convention!r}")
    return MuEstimate(min(raw, cap), raw, cap, convention, state)


# ---------------------------------------------------------------------------
# closed-form examples
# ---------------------------------------------------------------------------


def ppt_error_bound(d: int) -> float:
    """Error floor ``sqrt(1 - 1/d)`` of PPT-channel codes of rank ``d``."""
    if d < 1:
        raise PreconditionError("d must be >= 1")
    return math.sqrt(1 - 1 / d)


def ideal_fidelity(n: int, d: int) -> float:
    """Best fidelity ``min(1, sqrt(2^n/d))`` of a rank-``d`` code over ``n`` noiseless qubits."""
    if d < 1 or n < 0:
        raise PreconditionError("need d >= 1 and n >= 0")
    return min(1.0, math.sqrt(2.0 ** n / d))


def dephasing_assisted_rates(p: float) -> tuple[float, float]:
    """``(1 - h(p)/2, h(1/2 + sqrt(p(1-p))))`` for the dephasing channel ``Z_p``."""
    from .entropies import binary_entropy

    if not 0 <= p <= 1:
        raise PreconditionError("p must be in [0, 1]")
    q_e = 1 - binary_entropy(p) / 2
    x = min(1.0, 0.5 + math.sqrt(p * (1 - p)))
    return q_e, binary_entropy(x)


# ---------------------------------------------------------------------------
# private codes
# ---------------------------------------------------------------------------


@dataclass
class PrivateCode:
    """Signal states ``ρ_x`` on ``A'`` and a decoding POVM ``D_x`` on ``B``."""

    signals: np.ndarray
    povm: np.ndarray

    def __post_init__(self):
        self.signals = np.asarray(self.signals, dtype=complex)
        self.povm = np.asarray(self.povm, dtype=complex)
        if self.signals.ndim != 3 or self.povm.ndim != 3 or len(self.signals) != len(self.povm):
            raise DimensionError("need M signal states and M POVM elements")
        self.validate()

    @property
    def M(self) -> int:
        return len(self.signals)

    def validate(self, tol: float = 1e-8) -> None:
        for r in self.signals:
            if abs(np.trace(r).real - 1) > tol or np.linalg.eigvalsh(herm(r))[0] < -tol:
                raise PreconditionError("signal states must be normalized density matrices")
        for d in self.povm:
            if np.linalg.eigvalsh(herm(d))[0] < -tol:
                raise PreconditionError("POVM elements must be positive semidefinite")
        if np.max(np.abs(self.povm.sum(axis=0) - np.eye(self.povm.shape[1]))) > tol:
            raise PreconditionError("POVM elements must sum to the identity")


def _fidelity_block(p: sdp.SdpProblem, name: str, sigma_terms, rho: np.ndarray):
    """Add ``[[σ, Z], [Z^dag, Λ]] >= 0`` with ``ρ = V Λ V^dag``; return the objective term.

    ``Re Tr(V^dag Z)`` at the optimum equals ``F(σ, ρ)``.  Restricting to the
    support of ``ρ`` keeps the block strictly feasible.
    """
    w, v = support_basis(herm(rho))
    d, r = v.shape
    z = p.complex_matrix(name, d, r)
    shape = ((d, r), (d, r))
    lam = np.zeros((d + r, d + r), dtype=complex)
    lam[d:, d:] = np.diag(w)
    terms = [(var, sdp.compose(sdp.block_map(shape, (0, 0)), f)) for var, f in sigma_terms]
    p.add_constraint(name + "_block", terms + [(z, sdp.block_map(shape, (0, 1), "herm"))], ">=", const=lam)
    return z, sdp.inner_map(v)


def _as_state(sigma: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(herm(sigma))
    s = (v * np.clip(w, 0, None)) @ v.conj().T
    return s / np.trace(s).real


def max_average_fidelity(states: np.ndarray) -> tuple[float, np.ndarray]:
    """``max_σ (1/M) sum_x F(ρ_x, σ)`` over states ``σ`` by one SDP.

    Each fidelity uses ``F(ρ, σ) = max Re Tr Z  s.t.  [[σ, Z], [Z^dag, ρ]] >= 0``.
    The returned value is the exact average fidelity at the optimal ``σ``.
    """
    states = np.asarray(states, dtype=complex)
    m, d, _ = states.shape
    p = sdp.SdpProblem("avg_fidelity")
    sig = p.hermitian("sigma", d, psd=True)
    p.add_constraint("trace", [(sig, sdp.trace_map)], "==", const=-1.0)
    obj = []
    for x in range(m):
        z, f = _fidelity_block(p, f"Z{x}", [(sig, sdp._ident)], states[x])
        obj.append((z, sdp.scaled(f, 1 / m)))
    p.maximize(obj)
    sol = sdp.solve(p, raise_on_fail=True)
    sigma = _as_state(sol["sigma"])
    return min(1.0, float(np.mean([fidelity(r, sigma) for r in states]))), sigma


def private_code_metrics(channel: Channel, code: PrivateCode) -> tuple[float, float]:
    """``(error, privacy)`` of a private classical code in purified distance."""
    if code.signals.shape[1] != channel.din or code.povm.shape[1] != channel.dout:
        raise DimensionError("code dimensions do not match the channel")
    outs = channel(code.signals)
    succ = np.real(np.einsum("xij,xji->x", outs, code.povm))
    avg = float(np.mean(np.sqrt(np.clip(succ, 0, None))))
    error = math.sqrt(max(0.0, 1 - avg ** 2))
    env = complementary(channel)(code.signals)
    f, _ = max_average_fidelity(env)
    privacy = math.sqrt(max(0.0, 1 - f ** 2))
    return error, privacy


# ---------------------------------------------------------------------------
# optimal decoder
# ---------------------------------------------------------------------------


def max_entangled_input(d: int, din: int) -> PureState:
    """``Φ_d`` between ``Ã`` (dim ``d``) and the first ``d`` levels of ``A'``."""
    if not 1 <= d <= din:
        raise DimensionError("need 1 <= d <= |A'|")
    v = np.zeros((d, din), dtype=complex)
    v[np.arange(d), np.arange(d)] = 1 / math.sqrt(d)
    return PureState(v.reshape(-1), [("At", d), ("A'", din)])


@dataclass
class DecoderResult:
    fidelity: float
    entanglement_fidelity: float
    decoder_choi: np.ndarray
    solution: object


def optimal_decoder(channel: Channel, state: PureState) -> DecoderResult:
    """Decoder ``D: B -> Ã'`` maximizing ``<Φ_d|(id ⊗ D∘N)φ|Φ_d>``."""
    vec = np.asarray(state.vector if isinstance(state, PureState) else state, dtype=complex).reshape(-1)
    if vec.size % channel.din:
        raise DimensionError("input must live on Ã ⊗ A'")
    d = vec.size // channel.din
    db = channel.dout
    check_dim(2 * db * d)
    omega = channel.apply_local(np.outer(vec, vec.conj()), [d, channel.din], 1)  # Ã B
    om = omega.reshape(d, db, d, db)
    # objective (1/d) sum omega[a,b,a',b'] J[(b,a),(b',a')]
    k = np.transpose(om, (1, 0, 3, 2)).reshape(db * d, db * d).conj() / d
    p = sdp.SdpProblem("decoder")
    j = p.hermitian("J", db * d, psd=True)
    p.add_constraint("tp", [(j, sdp.ptrace_map([db, d], [0]))], "==", const=-np.eye(db))
    p.maximize([(j, sdp.inner_map(k))])
    sol = sdp.solve(p, raise_on_fail=True)
    fe = float(np.clip(sol.primal_value, 0, 1))
    return DecoderResult(math.sqrt(fe), fe, sol["J"], sol)


def optimal_decoder_fidelity(channel: Channel, state: PureState) -> float:
    """Best fidelity ``F = sqrt(<Φ_d|(id ⊗ D∘N)φ|Φ_d>)`` over decoders ``D``."""
    return optimal_decoder(channel, state).fidelity


# ---------------------------------------------------------------------------
# decoupling
# ---------------------------------------------------------------------------


def _ae_marginal(state, target: str = "A", env: str = "E") -> tuple[np.ndarray, int, int]:
    if isinstance(state, PureState):
        state = state.density()
    if not isinstance(state, DensityOperator):
        raise TypeError("state must be a PureState or DensityOperator with named factors")
    names = state.names
    if target not in names:
        raise DimensionError(f"no factor named {target!r}")
    keep = [target] + ([env] if env in names else [])
    red = partial_trace(state, keep)
    da = red.dims[0]
    de = red.dims[1] if len(keep) == 2 else 1
    return red.matrix, da, de


def product_fidelity(rho_ae: np.ndarray, tau: np.ndarray, de: int) -> tuple[float, np.ndarray]:
    """``max_φ F(ρ^{AE}, τ ⊗ φ)`` over states ``φ`` on ``E``.

    ``τ`` must be proportional to a projector; the problem is compressed to
    its range, which contains the support of ``ρ^{AE}``.  Fidelity grows
    with ``Tr φ``, so the optimum over subnormalized ``φ`` is normalized.
    """
    w, u = support_basis(herm(tau))
    k = np.kron(u, np.eye(de))
    rho_c = k.conj().T @ rho_ae @ k
    tau_c = np.diag(w)
    p = sdp.SdpProblem("product_fidelity")
    phi = p.hermitian("phi", de, psd=True)
    z, f = _fidelity_block(p, "Z", [(phi, sdp.kron_left(tau_c))], rho_c)
    p.add_constraint("trace", [(phi, sdp.trace_map)], "==", const=-1.0)
    p.maximize([(z, f)])
    sol = sdp.solve(p, raise_on_fail=True)
    phi_opt = _as_state(sol["phi"])
    return min(1.0, fidelity(rho_ae, np.kron(tau, phi_opt))), phi_opt


@dataclass
class DecouplingTrialResult:
    seed: int
    t_Q: float
    distance: float
    bound: float
    hmin_eta: float
    d: int
    resampled: bool = False


def one_shot_rank(hmin_eta: float, eps: float) -> int:
    """``floor(2^{H_min^η(A|E) - 4 log(1/ε)})``, the code rank guaranteed one-shot."""
    if not 0 < eps <= 1:
        raise PreconditionError("epsilon must be in (0, 1]")
    return int(math.floor(2.0 ** (hmin_eta - 4 * _log2(1 / eps))))


def decoupling_bound(hmin_eta: float, eta: float, d: int) -> float:
    return eta + 2.0 ** (-0.25 * (hmin_eta - _log2(d)))


def decoupling_trial(psi, d: int | None, eta: float, eps: float, seed: int, hmin_eta: float | None = None,
                     target: str = "A", env: str = "E") -> DecouplingTrialResult:
    """One random-projector sample of the one-shot decoupling inequality.

    Samples a Haar projector ``Q`` of rank ``d`` on ``A``, forms
    ``ψ̃_Q = (|A|/d)(Q ⊗ 1)ψ(Q ⊗ 1)/t_Q`` and reports
    ``min_φ P(ψ̃_Q^{AE}, τ_Q ⊗ φ)`` together with ``η + 2^{-(H_min^η(A|E) - log d)/4}``.
    ``d = None`` uses the one-shot rank (at least 1).
    """
    rho, da, de = _ae_marginal(psi, target, env)
    if hmin_eta is None:
        hmin_eta = hmin_smooth_bipartite(rho, da, de, eta) if eta > 0 else hmin_bipartite(rho, da, de)
    if d is None:
        d = max(1, one_shot_rank(hmin_eta, eps))
    if not 1 <= d <= da:
        raise PreconditionError(f"d must be in [1, {da}]")
    rng = np.random.default_rng(seed)
    resampled = False
    for _ in range(10):
        q = haar_projector(da, d, rng)
        qe = np.kron(q, np.eye(de))
        t = float(np.trace(qe @ rho).real) * da / d
        if t >= 1e-12:
            break
        resampled = True
    else:
        raise RuntimeError("projector samples keep annihilating the state")
    tilde = herm(qe @ rho @ qe * (da / d) / t)
    f, _ = product_fidelity(tilde, q / d, de)
    dist = math.sqrt(max(0.0, 1 - f ** 2))
    return DecouplingTrialResult(seed, t, dist, decoupling_bound(hmin_eta, eta, d), hmin_eta, d, resampled)


@dataclass
class BertaResult:
    mean: float
    stderr: float
    bound: float
    hmin: float
    values: np.ndarray

    @property
    def holds(self) -> bool:
        return self.mean <= self.bound + 3 * self.stderr


def berta_average(psi, d: int, trials: int = 500, seed: int = 0, target: str = "A", env: str = "E") -> BertaResult:
    """Monte Carlo average of ``||(|A|/d)(Q ⊗ 1)ψ^{AE}(Q ⊗ 1) - τ_Q ⊗ ψ^E||_1``.

    The bound is ``2^{-(H_min(A|E) - log d)/2}`` with ``τ_Q = Q/d``.
    """
    if trials < 10:
        raise PreconditionError("need at least 10 trials")
    rho, da, de = _ae_marginal(psi, target, env)
    if not 1 <= d <= da:
        raise PreconditionError(f"d must be in [1, {da}]")
    rho_e = ptrace(rho, [da, de], [1])
    h = hmin_bipartite(rho, da, de)
    rng = np.random.default_rng(seed)
    vals = np.empty(trials)
    for k in range(trials):
        q = haar_projector(da, d, rng)
        qe = np.kron(q, np.eye(de))
        vals[k] = trace_norm(qe @ rho @ qe * (da / d) - np.kron(q / d, rho_e))
    mean = math.fsum(vals) / trials
    std = math.sqrt(math.fsum((vals - mean) ** 2) / (trials - 1)) / math.sqrt(trials)
    return BertaResult(mean, std, 2.0 ** (-0.5 * (h - _log2(d))), h, vals)


# ---------------------------------------------------------------------------
# de Finetti dominance
# ---------------------------------------------------------------------------


def _check_permutation_invariant(rho: np.ndarray, d: int, n: int, tol: float = 1e-8) -> None:
    from .symmetry import transposition

    for k in range(n - 1):
        p = transposition(d, n, k, k + 1)
        if np.max(np.abs(p @ rho @ p.T - rho)) > tol:
            raise PreconditionError("state is not permutation invariant")


def definetti_mixture(d: int, n: int) -> np.ndarray:
    """``ω^(n) = ∫ dσ σ^{⊗n}`` realized as ``Tr_{H'^n} P_Sym/dim Sym`` on ``(H ⊗ H')^{⊗n}``."""
    check_dim((d * d) ** n)
    p, dim_sym = symmetric_projector(d * d, n)
    keep = [2 * k for k in range(n)]
    return herm(ptrace(p / dim_sym, [d, d] * n, keep))


def definetti_dominance(rho_bar, d: int | None = None, n: int | None = None, form: str = "mixed") -> float:
    """Smallest eigenvalue of ``n^{d^2} ω^(n) - ρ̄`` (``form="mixed"``).

    ``form="pure"`` checks ``n^d P_Sym/dim Sym - ρ̄`` for states supported on
    the symmetric subspace.
    """
    if isinstance(rho_bar, DensityOperator):
        dims = rho_bar.dims
        d, n = dims[0], len(dims)
        rho = rho_bar.matrix
    else:
        rho = as_matrix(rho_bar)
        if d is None or n is None:
            raise DimensionError("give d and n for a bare matrix")
    if rho.shape != (d ** n, d ** n):
        raise DimensionError("state does not live on (C^d)^{⊗n}")
    _check_permutation_invariant(rho, d, n)
    if form == "mixed":
        dominant = n ** (d * d) * definetti_mixture(d, n)
    elif form == "pure":
        p, dim_sym = symmetric_projector(d, n)
        dominant = n ** d * p / dim_sym
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(np.linalg.eigvalsh(herm(dominant - rho))[0])


def random_permutation_invariant(d: int, n: int, seed=None) -> np.ndarray:
    """Twirl of a random density matrix over site permutations."""
    from .symmetry import twirl

    return herm(twirl(random_density(d ** n, seed), d, n))


__all__ = [
    "ConverseBoundReport",
    "PreconditionError",
    "weak_bound",
    "thm1_bound",
    "thm2_bound",
    "thm3_bound",
    "default_mu",
    "mu_at",
    "ppt_error_bound",
    "ideal_fidelity",
    "dephasing_assisted_rates",
    "PrivateCode",
    "private_code_metrics",
    "max_average_fidelity",
    "optimal_decoder_fidelity",
    "optimal_decoder",
    "max_entangled_input",
    "decoupling_trial",
    "DecouplingTrialResult",
    "berta_average",
    "one_shot_rank",
    "definetti_dominance",
    "definetti_mixture",
    "random_permutation_invariant",
]
