import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qconv.channels import dephasing, erasure, identity, random_channel
from qconv.entropies import (
    AepParams,
    EntropyError,
    EntropyQuery,
    aep_bound,
    aep_params_for,
    binary_entropy,
    check_chain_max_lower,
    check_chain_max_upper,
    check_duality,
    check_max_min,
    check_max_plus_log,
    check_min_max,
    check_monotonicity,
    check_unitary_concavity,
    coherent_information,
    conditional_entropy,
    erasure_extremal_state,
    hmax,
    hmax_bipartite,
    hmax_fidelity,
    hmax_smooth,
    hmax_smooth_bipartite,
    hmax_smooth_iid,
    hmin,
    hmin_bipartite,
    hmin_smooth,
    hmin_smooth_bipartite,
    hmin_smooth_dual_value,
    hmin_smooth_iid,
    purification_complement,
    q1,
    smooth_hmin_purified_dual,
    tensor_power_state,
    typical_projector,
    von_neumann,
)
from qconv.matqi import DensityOperator, DimensionError, PureState, haar_state, haar_unitary, max_entangled, ptrace, random_density


def phi(d):
    v = max_entangled(d)
    return np.outer(v, v.conj())


@pytest.mark.parametrize("rho, expected", [
    (np.diag([1.0, 0.0]), 0.0),
    (np.eye(2) / 2, 1.0),
    (np.diag([0.9, 0.1]), binary_entropy(0.1)),
])
def test_von_neumann(rho, expected):
    assert von_neumann(rho) == pytest.approx(expected, abs=1e-12)


def test_von_neumann_rejects_subnormalized():
    with pytest.raises(EntropyError):
        von_neumann(np.eye(2) / 4)


def test_binary_entropy_value():
    assert binary_entropy(0.1) == pytest.approx(0.4689955935892812, abs=1e-12)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


@pytest.mark.parametrize("channel, expected", [
    (identity(2), 1.0),
    (dephasing(0.1), 1 - binary_entropy(0.1)),
    (dephasing(0.25), 1 - binary_entropy(0.25)),
    (erasure(2, 0.5), 0.0),
])
def test_coherent_information_at_maximally_mixed(channel, expected):
    assert coherent_information(channel, np.eye(2) / 2) == pytest.approx(expected, abs=1e-12)


def test_coherent_information_errors():
    with pytest.raises(Exception):
        coherent_information(identity(2), np.eye(3) / 3)


@given(st.integers(0, 1000))
def test_coherent_information_two_routes(seed):
    # reference-system route vs output/environment entropies
    ch = random_channel(2, 2, 2, seed)
    rho = random_density(2, seed=seed + 1)
    from qconv.channels import complementary

    fast = von_neumann(ch(rho)) - von_neumann(complementary(ch)(rho))
    assert coherent_information(ch, rho) == pytest.approx(fast, abs=1e-10)


@pytest.mark.parametrize("channel, expected, tol", [
    (identity(2), 1.0, 1e-8),
    (dephasing(0.1), 1 - binary_entropy(0.1), 1e-6),
    (erasure(2, 0.3), 0.4, 1e-6),
])
def test_q1_values(channel, expected, tol):
    res = q1(channel)
    assert res.value == pytest.approx(expected, abs=tol)
    assert res.value >= coherent_information(channel, np.eye(channel.din) / channel.din) - 1e-12
    assert np.trace(res.state).real == pytest.approx(1)
    assert np.linalg.eigvalsh(res.state)[0] >= -1e-12
    if res.grid_value is not None:
        assert res.value >= res.grid_value - 1e-9


def test_q1_on_erasure_matches_grid_over_spectra():
    # erasure coherent information is (1 - 2q) S(ρ); maximize over a fine grid of spectra
    grid = max((1 - 0.6) * binary_entropy(p) for p in np.linspace(0, 1, 2001))
    assert q1(erasure(2, 0.3)).value == pytest.approx(grid, abs=1e-6)


def test_entropy_query_validation():
    rho = DensityOperator(phi(2), [("A", 2), ("B", 2)])
    with pytest.raises(EntropyError):
        EntropyQuery(rho, "A", "A")
    with pytest.raises(EntropyError):
        EntropyQuery(rho, "A", "B", eps=1.0)
    assert hmin(EntropyQuery(rho, "A", "B")) == pytest.approx(-1, abs=1e-7)
    assert hmax(EntropyQuery(rho, "A", "B")) == pytest.approx(-1, abs=1e-7)
    assert hmin(EntropyQuery(rho, "A")) == pytest.approx(1, abs=1e-7)


def test_hmin_examples():
    assert hmin_bipartite(phi(2), 2, 2) == pytest.approx(-1, abs=1e-7)
    sigma = random_density(3, seed=4)
    assert hmin_bipartite(np.kron(np.eye(2) / 2, sigma), 2, 3) == pytest.approx(1, abs=1e-7)
    assert hmax_bipartite(phi(2), 2, 2) == pytest.approx(-1, abs=1e-7)


@given(st.integers(0, 1000))
@settings(max_examples=10)
def test_hmax_two_routes(seed):
    # duality on a purification vs the direct fidelity program
    rho = random_density(4, seed=seed, rank_=2)
    assert hmax_bipartite(rho, 2, 2) == pytest.approx(hmax_fidelity(rho, 2, 2), abs=1e-6)


@given(st.integers(0, 1000))
@settings(max_examples=10)
def test_smoothing_is_monotone_and_continuous_at_zero(seed):
    rho = random_density(4, seed=seed)
    h0 = hmin_bipartite(rho, 2, 2)
    assert hmin_smooth_bipartite(rho, 2, 2, 0.0) == pytest.approx(h0, abs=1e-6)
    a, b = hmin_smooth_bipartite(rho, 2, 2, 0.1), hmin_smooth_bipartite(rho, 2, 2, 0.3)
    assert h0 <= a + 1e-6 and a <= b + 1e-6
    ma, mb = hmax_smooth_bipartite(rho, 2, 2, 0.1), hmax_smooth_bipartite(rho, 2, 2, 0.3)
    assert mb <= ma + 1e-6


@given(st.integers(0, 1000), st.sampled_from([0.1, 0.3, 0.5]))
@settings(max_examples=10)
def test_smooth_hmin_two_routes(seed, eps):
    # fidelity block on AB vs the purified dual program on G E E'
    rho = random_density(4, seed=seed, rank_=2)
    m = np.linalg.eigh(rho)
    w, v = m
    vec = (v * np.sqrt(np.clip(w, 0, None))).reshape(-1)
    sol = smooth_hmin_purified_dual(vec, [2, 2, 4], 1 - eps ** 2)
    assert -math.log2(sol.value) == pytest.approx(hmin_smooth_bipartite(rho, 2, 2, eps), abs=1e-5)


def test_smooth_queries_and_boundaries():
    rho = DensityOperator(random_density(4, seed=1), [("A", 2), ("B", 2)])
    q = EntropyQuery(rho, "A", "B", eps=0.2)
    assert hmin_smooth(q) >= hmin(EntropyQuery(rho, "A", "B")) - 1e-6
    assert hmax_smooth(q) <= hmax(EntropyQuery(rho, "A", "B")) + 1e-6
    with pytest.raises(EntropyError):
        hmax_smooth_bipartite(rho.matrix, 2, 2, 1.0)


def test_smoothing_jump_on_extremal_state():
    st_ = erasure_extremal_state(2)
    rho = st_.density().ptrace(["At", "E"]).matrix
    low = hmin_smooth_bipartite(rho, 2, 3, 0.5)
    high = hmin_smooth_bipartite(rho, 2, 3, 0.75)
    assert high - low >= 0.5


def test_dual_value_examples():
    psi = PureState(haar_state(8, seed=3), [("G", 2), ("E", 2), ("Ep", 2)])
    ok, val, _ = hmin_smooth_dual_value(psi, [2, 2, 2], 0.75, (0.0, 0.0, np.zeros((4, 4))))
    assert ok and val == 0
    sol = smooth_hmin_purified_dual(psi, [2, 2, 2], 0.75)
    ok, val, _ = hmin_smooth_dual_value(psi, [2, 2, 2], 0.75, (sol.r, sol.s, sol.X), tol=1e-7)
    assert ok
    rho_ge = ptrace(np.outer(psi.vector, psi.vector.conj()), [2, 2, 2], [0, 1])
    primal = 2.0 ** (-hmin_smooth_bipartite(rho_ge, 2, 2, 0.5))
    assert val == pytest.approx(primal, abs=1e-6)
    # r = 2 with X = 0 and s = 0 cannot dominate r ψ
    ok, _, res = hmin_smooth_dual_value(psi, [2, 2, 2], 0.75, (2.0, 0.0, np.zeros((4, 4))))
    assert not ok and res["op"] > 1


@pytest.mark.parametrize("side, expected", [
    ("max_upper", 50 + 2 * math.sqrt(100 * math.log(4))),
    ("min_lower", 50 - 2 * math.sqrt(100 * math.log(4))),
])
def test_aep_bound_examples(side, expected):
    p = AepParams(1.0, 1.0, 100, 0.5)
    assert aep_bound(p, 0.5, side) == pytest.approx(expected, abs=1e-12)


def test_aep_bound_more():
    p = AepParams(1.0, 1.0, 1, 0.99)
    assert aep_bound(p, 0.0, "max_upper") == pytest.approx(2 * math.sqrt(math.log(2 / 0.99)), abs=1e-12)
    q = AepParams(0.3, 0.7, 7, 0.2)
    assert aep_bound(q, 0.4, "min_lower") == pytest.approx(2 * 7 * 0.4 - aep_bound(q, 0.4, "max_upper"))
    for bad in [dict(mu_b=1, mu_c=1, n=0, eps=0.5), dict(mu_b=-1, mu_c=1, n=1, eps=0.5),
                dict(mu_b=1, mu_c=1, n=1, eps=1.0)]:
        with pytest.raises(EntropyError):
            AepParams(**bad)
    with pytest.raises(EntropyError):
        aep_bound(p, 0.0, "sideways")


def test_aep_params_for_product_state():
    rho = np.kron(np.eye(2) / 2, np.diag([0.75, 0.25]))
    params, s = aep_params_for(rho, 2, 2, 3, 0.1)
    assert s == pytest.approx(1.0)
    assert params.mu_b == pytest.approx(2.0)


def test_typical_projector_examples():
    pure = np.diag([1.0, 0.0])
    tp = typical_projector(pure, 3, 0.5)
    assert tp.weight == pytest.approx(1.0)
    rho = np.diag([0.9, 0.1])
    tp = typical_projector(rho, 4, 1.0, "+")
    # exact enumeration of the 16 strings
    s = binary_entropy(0.1)
    weight = 0.0
    for bits in itertools.product([0, 1], repeat=4):
        p = np.prod([0.1 if b else 0.9 for b in bits])
        if -math.log2(p) <= 4 * s + 2 + 1e-12:
            weight += p
    assert tp.weight == pytest.approx(weight, abs=1e-12)
    assert tp.weight >= 1 - math.exp(-2 / math.log2(10) ** 2)
    assert np.allclose(tp.projector @ tp.projector, tp.projector)
    big = typical_projector(rho, 3, 1e6, "+")
    assert np.allclose(big.projector, np.eye(8))
    with pytest.raises(EntropyError):
        typical_projector(rho, 2, 1.0, "*")


@pytest.mark.parametrize("n", [1, 2])
def test_iid_reduction_matches_dense(n):
    rho = random_density(4, seed=11, rank_=2)
    dense = tensor_power_state(rho, 2, 2, n)
    for eps in (0.0, 0.2):
        a = hmin_smooth_iid(rho, 2, 2, n, eps)
        b = hmin_smooth_bipartite(dense, 2 ** n, 2 ** n, eps) if eps else hmin_bipartite(dense, 2 ** n, 2 ** n)
        assert a == pytest.approx(b, abs=1e-5)
    rac, dc = purification_complement(rho, 2, 2)
    assert hmax_smooth_iid(rho, 2, 2, n, 0.2) == pytest.approx(-hmin_smooth_iid(rac, 2, dc, n, 0.2), abs=1e-12)


def test_conditional_entropy_of_bell_state():
    assert conditional_entropy(phi(2), [2, 2], [0], [1]) == pytest.approx(-1, abs=1e-12)


# smaller versions of the inequality suite; the full one lives with the acceptance tests

def _tripartite(seed):
    return random_density(8, seed=seed, rank_=2)


@given(st.integers(0, 10_000))
@settings(max_examples=4)
def test_inequalities_sample(seed):
    rng = np.random.default_rng(seed)
    rho = _tripartite(seed)
    rab = ptrace(rho, [2, 2, 2], [0, 1])
    e, d, h = rng.uniform(0.02, 0.15, 3)
    checks = [
        check_monotonicity(rho, [2, 2, 2], 0.2, "min"),
        check_monotonicity(rho, [2, 2, 2], 0.2, "max"),
        check_chain_max_upper(rho, [2, 2, 2], e, d, h),
        check_chain_max_lower(rho, [2, 2, 2], e, d, h),
        check_min_max(rab, 2, 2, 0.3, 0.4),
        check_max_min(rab, 2, 2, 0.5),
        check_duality(rab, 2, 2, 0.2, extra=2, seed=seed),
        check_unitary_concavity(rab, 2, 2, [haar_unitary(2, seed + k) for k in range(2)], [0.5, 0.5], 0.3),
        check_max_plus_log([rab, random_density(4, seed=seed + 1)], [0.3, 0.7], 2, 2, 0.2),
    ]
    for c in checks:
        assert c.holds(1e-5), (c.name, c.violation)


def test_inequality_preconditions():
    rho = _tripartite(0)
    rab = ptrace(rho, [2, 2, 2], [0, 1])
    with pytest.raises(EntropyError):
        check_min_max(rab, 2, 2, 0.8, 0.8)
    with pytest.raises(EntropyError):
        check_max_min(rab, 2, 2, 0.0)
    with pytest.raises(EntropyError):
        check_chain_max_upper(rho, [2, 2, 2], 0.5, 0.3, 0.1)
    with pytest.raises(EntropyError):
        check_unitary_concavity(rab, 2, 2, [np.eye(2)], [1.0], 0.75)


def test_iid_rejects_oversized_reduction():
    rho = random_density(4, seed=3)
    with pytest.raises(DimensionError):
        hmax_smooth_iid(rho, 2, 2, 3, 0.1)
