import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qconv.channels import constant, dephasing, erasure, identity
from qconv.converse import (
    PreconditionError,
    PrivateCode,
    berta_average,
    decoupling_trial,
    default_mu,
    definetti_dominance,
    definetti_mixture,
    dephasing_assisted_rates,
    ideal_fidelity,
    max_average_fidelity,
    max_entangled_input,
    mu_at,
    one_shot_rank,
    optimal_decoder_fidelity,
    ppt_error_bound,
    private_code_metrics,
    random_permutation_invariant,
    thm1_bound,
    thm2_bound,
    thm3_bound,
    weak_bound,
)
from qconv.entropies import binary_entropy
from qconv.matqi import PureState, fidelity, haar_state, symmetric_projector

R2 = 1 / math.sqrt(2)


def thm1_oracle(q1, a, n, eps, mu):
    lam = (R2 - eps) / 4
    return (n * q1 + mu * math.sqrt(n * math.log(64 * n ** (a * a) / lam ** 2))
            + 3 * a * a * math.log2(n) + 5 + 5 * math.log2(1 / lam))


def thm2_oracle(q1, a, n, eps, delta, mu):
    eta = (R2 - eps - 2 * delta) / 6
    return (n * q1 + mu * math.sqrt(n * math.log(64 * n ** (a * a) / eta ** 2))
            + 3 * a * a * math.log2(n) + 9 + 11 * math.log2(1 / eta))


def thm3_oracle(q1, a, n, eps, mu, logne, c0=6.0):
    lam = (1 - eps) / 5
    return (n * q1 + mu * math.sqrt(n * math.log(64 * n ** (a * a) / lam ** 2))
            + 8 * math.log2(1 / lam) + 3 * a * a * math.log2(n) + c0 + logne)


@pytest.mark.parametrize("q1, n, eps, expected", [
    (0.531, 100, 0.25, 108.2),
    (0.531, 100, 0.0, 54.1),
    (0.2, 7, 0.1, (1.4 + 1) / 0.8),
])
def test_weak_bound(q1, n, eps, expected):
    rep = weak_bound(q1, n, eps)
    assert rep.total == pytest.approx(expected, abs=1e-9)
    assert rep.bound_kind == "Weak"


def test_weak_bound_boundary():
    with pytest.raises(PreconditionError):
        weak_bound(0.5, 10, 0.5)


def test_thm1_example():
    rep = thm1_bound(0.531, 2, 1000, 0.1, 2.0)
    assert rep.param == pytest.approx((R2 - 0.1) / 4, abs=1e-15)
    assert rep.param == pytest.approx(0.15178, abs=1e-5)
    assert rep.param ** 2 == pytest.approx(0.023036, abs=1e-6)
    assert rep.total == pytest.approx(thm1_oracle(0.531, 2, 1000, 0.1, 2.0), abs=1e-9)
    assert rep.term("n*q1") == pytest.approx(531.0)
    assert rep.term("3*A^2*log(n)") == pytest.approx(12 * math.log2(1000))
    assert math.fsum(v for _, v in rep.terms) == pytest.approx(rep.total, abs=1e-12)


def test_thm1_rate_gap_shrinks():
    q1 = 1 - binary_entropy(0.1)
    gaps = [thm1_bound(q1, 2, n, 0.1, 2.0).total / n - q1 for n in (100, 1000, 10_000)]
    assert gaps[0] > gaps[1] > gaps[2] > 0


@pytest.mark.parametrize("eps", [R2, 0.8, 0.0, -0.1])
def test_thm1_rejects(eps):
    with pytest.raises(PreconditionError):
        thm1_bound(0.5, 2, 10, eps, 1.0)


def test_thm1_other_rejections():
    with pytest.raises(PreconditionError):
        thm1_bound(0.5, 2, 0, 0.1, 1.0)
    with pytest.raises(PreconditionError):
        thm1_bound(0.5, 2, 10, 0.1, -1.0)


def test_thm2_examples():
    rep = thm2_bound(0.531, 2, 1000, 0.2, 0.2, 2.0)
    assert rep.param == pytest.approx((R2 - 0.6) / 6, abs=1e-15)
    assert rep.param == pytest.approx(0.017851, abs=1e-6)
    assert rep.total == pytest.approx(thm2_oracle(0.531, 2, 1000, 0.2, 0.2, 2.0), abs=1e-9)
    t = 1 / (3 * math.sqrt(2))
    with pytest.raises(PreconditionError):
        thm2_bound(0.5, 2, 10, t, t, 1.0)
    with pytest.raises(PreconditionError):
        thm2_bound(0.5, 2, 10, R2 - 0.2, 0.1, 1.0)
    d0 = thm2_bound(0.531, 2, 1000, 0.1, 0.0, 2.0)
    assert d0.term("constant") == 9.0


def test_thm3_examples():
    assert thm3_bound(0.5, 2, 10, 0.9, 1.0, 0.0).param == pytest.approx(0.02)
    rep = thm3_bound(0.5, 2, 10, 0.5, 1.0, 0.0)
    assert rep.term("8*log(1/lambda)") == pytest.approx(8 * math.log2(10), abs=1e-12)
    assert rep.term("8*log(1/lambda)") == pytest.approx(26.575, abs=1e-3)
    assert rep.term("O(log n): constant") == 6.0
    rep = thm3_bound(0.531, 2, 1000, 0.3, 2.0, 3.5, const=7.0)
    assert rep.total == pytest.approx(thm3_oracle(0.531, 2, 1000, 0.3, 2.0, 3.5, 7.0), abs=1e-9)
    for eps in (1.0, 0.0):
        with pytest.raises(PreconditionError):
            thm3_bound(0.5, 2, 10, eps, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        thm3_bound(0.5, 2, 10, 0.5, 1.0, -1.0)


@given(st.floats(0, 1), st.integers(1, 10 ** 6), st.floats(0.001, 0.7), st.floats(0, 5))
def test_bounds_are_pure_and_additive(q1, n, eps, mu):
    a = thm1_bound(q1, 2, n, eps, mu)
    b = thm1_bound(q1, 2, n, eps, mu)
    assert a.to_json() == b.to_json()
    assert a.total == pytest.approx(thm1_oracle(q1, 2, n, eps, mu), rel=1e-12)


def test_report_serialization():
    rep = thm1_bound(0.531, 2, 1000, 0.1, 2.0)
    d = rep.to_dict()
    assert d["bound_kind"] == "Thm1" and len(d["terms"]) == 5
    row = rep.csv_row()
    assert row[0] == "Thm1" and row[-1] == pytest.approx(rep.total)


@pytest.mark.parametrize("fn, args, expected", [
    (ppt_error_bound, (2,), R2),
    (ppt_error_bound, (1,), 0.0),
    (ideal_fidelity, (2, 8), R2),
    (ideal_fidelity, (3, 8), 1.0),
])
def test_closed_forms(fn, args, expected):
    assert fn(*args) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p, qe, ec", [
    (0.0, 1.0, 1.0),
    (0.5, 0.5, 0.0),
    (0.1, 1 - binary_entropy(0.1) / 2, binary_entropy(0.5 + math.sqrt(0.09))),
])
def test_dephasing_assisted_rates(p, qe, ec):
    a, b = dephasing_assisted_rates(p)
    assert a == pytest.approx(qe, abs=1e-12) and b == pytest.approx(ec, abs=1e-12)


@pytest.mark.parametrize("p", [0.05, 0.1, 0.3, 0.45, 0.7])
def test_assisted_rates_beat_unassisted(p):
    a, b = dephasing_assisted_rates(p)
    assert a > 1 - binary_entropy(p) and b > 1 - binary_entropy(p)


def test_mu_examples():
    # identity: complement is trivial, output maximally mixed at the optimizer
    est = default_mu(identity(2))
    assert est.raw == pytest.approx(1.0, abs=1e-6)
    ch = dephasing(0.1)
    rho = np.eye(2) / 2
    # output stays I/2, environment sees diag(0.9, 0.1)
    assert mu_at(ch, rho) == pytest.approx(1 + math.log2(10), abs=1e-9)
    uni = default_mu(ch, "uniform", samples=20)
    assert uni.value >= default_mu(ch).value - 1e-9
    assert uni.value <= uni.cap
    with pytest.raises(ValueError):
        default_mu(ch, "sometimes")


def basis_code(d=2):
    e = np.eye(d)
    return PrivateCode([np.outer(e[i], e[i]) for i in range(d)], [np.outer(e[i], e[i]) for i in range(d)])


def test_private_code_identity():
    err, priv = private_code_metrics(identity(2), basis_code())
    assert err == pytest.approx(0, abs=1e-7)
    assert priv == pytest.approx(0, abs=1e-4)


def test_private_code_zero_dephasing():
    err, priv = private_code_metrics(dephasing(0.0), basis_code())
    assert err == pytest.approx(0, abs=1e-7) and priv == pytest.approx(0, abs=1e-4)


def test_private_code_constant_channel():
    sigma = np.diag([0.7, 0.3])
    code = PrivateCode([np.eye(2) / 2, np.eye(2) / 2], basis_code().povm)
    err, priv = private_code_metrics(constant(sigma), code)
    # success probabilities 0.7 and 0.3 for the two messages
    avg = (math.sqrt(0.7) + math.sqrt(0.3)) / 2
    assert err == pytest.approx(math.sqrt(1 - avg ** 2), abs=1e-9)
    assert priv == pytest.approx(0, abs=1e-4)


def test_private_code_leaky_dephasing():
    err, priv = private_code_metrics(dephasing(0.3), basis_code())
    # complement outputs are diag-distinguishable, so some information leaks
    assert err == pytest.approx(0, abs=1e-7) and priv > 0.01


def test_private_code_validation():
    e = np.eye(2)
    with pytest.raises(PreconditionError):
        PrivateCode([np.eye(2)], [np.eye(2)])
    with pytest.raises(PreconditionError):
        PrivateCode([np.outer(e[0], e[0])], [np.outer(e[0], e[0])])


def test_average_fidelity_two_routes(rng):
    # SDP optimum vs brute force over the Bloch ball
    states = np.array([np.diag([1.0, 0.0]), np.full((2, 2), 0.5)])
    f, sigma = max_average_fidelity(states)
    best = 0.0
    for th in np.linspace(0, math.pi, 721):
        v = np.array([math.cos(th / 2), math.sin(th / 2)])
        s = np.outer(v, v)
        best = max(best, np.mean([fidelity(r, s) for r in states]))
    assert f == pytest.approx(best, abs=1e-5)
    assert f == pytest.approx(math.cos(math.pi / 8), abs=1e-6)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_decoder_identity(d):
    assert optimal_decoder_fidelity(identity(3), max_entangled_input(d, 3)) == pytest.approx(1, abs=1e-6)


def test_decoder_constant_channel():
    f = optimal_decoder_fidelity(constant(np.eye(2) / 2), max_entangled_input(2, 2))
    # any decoder output is (1/2) ⊗ σ, whose overlap with Φ_2 is 1/4
    assert f <= R2
    assert f == pytest.approx(0.5, abs=1e-6)


def test_decoder_half_erasure():
    f = optimal_decoder_fidelity(erasure(2, 0.5), max_entangled_input(2, 2))
    # erased half the time, then the best guess has entanglement fidelity 1/4
    assert f == pytest.approx(math.sqrt(0.5 + 0.5 / 4), abs=1e-6)
    assert f < 1


@pytest.mark.parametrize("channel", [dephasing(0.2), erasure(3, 0.3)])
def test_decoder_monotone_in_rank(channel):
    vals = [optimal_decoder_fidelity(channel, max_entangled_input(d, channel.din)) for d in range(1, channel.din + 1)]
    assert all(a >= b - 1e-6 for a, b in zip(vals, vals[1:]))


def test_decoder_rejects_rank():
    with pytest.raises(Exception):
        max_entangled_input(3, 2)


def abe_state(seed, da=4, db=2, de=2):
    return PureState(haar_state(da * db * de, seed=seed), [("A", da), ("B", db), ("E", de)])


def test_berta_trivial_cases():
    mixed = PureState(np.eye(4).reshape(-1) / 2, [("A", 4), ("B", 4)])
    res = berta_average(mixed, 4, trials=10)
    assert res.mean == pytest.approx(0, abs=1e-12)
    with pytest.raises(PreconditionError):
        berta_average(mixed, 2, trials=5)
    with pytest.raises(PreconditionError):
        berta_average(mixed, 5, trials=10)


def test_berta_full_rank_is_exact():
    psi = PureState(haar_state(8, seed=2), [("A", 4), ("E", 2)])
    res = berta_average(psi, 4, trials=10)
    rho = np.outer(psi.vector, psi.vector.conj())
    from qconv.matqi import ptrace, trace_norm

    ra, re = ptrace(rho, [4, 2], [0]), ptrace(rho, [4, 2], [1])
    assert res.mean == pytest.approx(trace_norm(rho - np.kron(np.eye(4) / 4, re)), abs=1e-10)
    assert np.allclose(ra, ra.conj().T)


@pytest.mark.parametrize("d", [1, 2])
def test_berta_bound_holds(d):
    res = berta_average(abe_state(7), d, trials=100, seed=1)
    assert res.holds


def test_one_shot_rank():
    assert one_shot_rank(2.0, 1.0) == 4
    assert one_shot_rank(2.0, 0.5) == 0
    with pytest.raises(PreconditionError):
        one_shot_rank(1.0, 0.0)


def test_decoupling_trial_full_rank():
    psi = PureState(np.eye(4).reshape(-1) / 2, [("A", 4), ("B", 4)])
    res = decoupling_trial(psi, 4, 0.05, 0.3, seed=0)
    assert res.t_Q == pytest.approx(1, abs=1e-12)
    assert res.distance == pytest.approx(0, abs=1e-4)
    assert 0 <= res.distance <= 1


def test_decoupling_trials_meet_bound():
    psi = abe_state(3)
    results = [decoupling_trial(psi, 2, 0.05, 0.3, seed=s) for s in range(10)]
    assert min(r.distance for r in results) <= results[0].bound
    assert all(0 <= r.distance <= 1 for r in results)
    with pytest.raises(PreconditionError):
        decoupling_trial(psi, 5, 0.05, 0.3, seed=0)


def test_definetti_examples():
    p, dim = symmetric_projector(2, 2)
    assert definetti_dominance(p / dim, 2, 2) >= -1e-9
    assert definetti_dominance(p / dim, 2, 2, form="pure") >= -1e-9
    v = haar_state(2, seed=1)
    prod = np.kron(np.outer(v, v.conj()), np.outer(v, v.conj()))
    assert definetti_dominance(prod, 2, 2, form="pure") >= -1e-9
    omega = definetti_mixture(2, 2)
    assert np.trace(omega).real == pytest.approx(1)


@pytest.mark.parametrize("n", [2, 3])
def test_definetti_random(n):
    for seed in range(3):
        assert definetti_dominance(random_permutation_invariant(2, n, seed), 2, n) >= -1e-9


def test_definetti_rejects_asymmetric():
    rho = np.zeros((4, 4))
    rho[1, 1] = 1
    with pytest.raises(PreconditionError):
        definetti_dominance(rho, 2, 2)
