import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qconv.matqi import (
    DensityOperator,
    DimensionError,
    Isometry,
    NotPositiveError,
    PureState,
    fidelity,
    generalized_inverse_lognorm,
    haar_sample,
    kron,
    max_entangled,
    partial_trace,
    ptrace,
    purified_distance,
    purify,
    random_density,
    symmetric_projector,
    trace_distance,
)

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def test_density_operator_rejects_bad_input():
    with pytest.raises(NotPositiveError):
        DensityOperator(np.diag([1.5, -0.5]))
    with pytest.raises(NotPositiveError):
        DensityOperator(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(DimensionError):
        DensityOperator(np.eye(4) / 4, [("A", 2), ("B", 3)])
    with pytest.raises(NotPositiveError):
        DensityOperator(np.eye(2) / 4, normalized=True)


def test_density_operator_symmetrizes_and_flags_subnormalized():
    m = np.array([[0.5, 1e-12], [0, 0.25]])
    rho = DensityOperator(m)
    assert np.allclose(rho.matrix, rho.matrix.conj().T)
    assert not rho.normalized


def test_pure_state_and_isometry_validation():
    with pytest.raises(NotPositiveError):
        PureState([1, 1])
    with pytest.raises(DimensionError):
        Isometry(np.ones((1, 2)))
    with pytest.raises(NotPositiveError):
        Isometry(np.array([[1, 0], [0, 2], [0, 0]]))
    Isometry(np.eye(3)[:, :2])


@pytest.mark.parametrize("rho, sigma, expected", [
    (KET0, KET1, 0.0),
    (KET0, PLUS, 1 / math.sqrt(2)),
    (KET0 / 2, KET0, math.sqrt(0.5)),
    (PLUS, PLUS, 1.0),
])
def test_fidelity_examples(rho, sigma, expected):
    assert fidelity(rho, sigma) == pytest.approx(expected, abs=1e-12)
    assert fidelity(sigma, rho) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("rho, sigma, pd, td", [
    (KET0, KET0, 0.0, 0.0),
    (KET0, KET1, 1.0, 1.0),
    (KET0, PLUS, math.sqrt(0.5), 1 / math.sqrt(2)),
])
def test_distance_examples(rho, sigma, pd, td):
    assert purified_distance(rho, sigma) == pytest.approx(pd, abs=1e-7)
    assert trace_distance(rho, sigma) == pytest.approx(td, abs=1e-12)


def test_fidelity_errors():
    with pytest.raises(DimensionError):
        fidelity(np.eye(2) / 2, np.eye(3) / 3)
    with pytest.raises(NotPositiveError):
        fidelity(np.diag([1.2, -0.2]), np.eye(2) / 2)


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_distance_inequalities(seed, d):
    rho = random_density(d, seed=seed)
    sigma = random_density(d, seed=seed + 1, rank_=max(1, d - 1))
    tau = random_density(d, seed=seed + 2)
    p = purified_distance(rho, sigma)
    tn = 2 * trace_distance(rho, sigma)
    assert tn / 2 <= p + 1e-9
    assert p <= math.sqrt(tn) + 1e-9
    assert p <= purified_distance(rho, tau) + purified_distance(tau, sigma) + 1e-9


def test_partial_trace_examples():
    phi = PureState(max_entangled(2), [("A", 2), ("B", 2)])
    assert np.allclose(partial_trace(phi, ["A"]).matrix, np.eye(2) / 2)
    ra, sb = random_density(2, seed=1), random_density(3, seed=2)
    prod = DensityOperator(np.kron(ra, sb), [("A", 2), ("B", 3)])
    assert np.allclose(partial_trace(prod, ["A"]).matrix, ra)
    assert np.allclose(partial_trace(prod, ["B"]).matrix, sb)
    ghz = PureState(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / math.sqrt(2), [("A", 2), ("B", 2), ("C", 2)])
    want = np.zeros((4, 4))
    want[0, 0] = want[3, 3] = 0.5
    assert np.allclose(partial_trace(ghz, ["A", "B"]).matrix, want)
    with pytest.raises(DimensionError):
        partial_trace(ghz, ["Z"])


def test_partial_trace_reorders_kept_systems():
    ra, sb = random_density(2, seed=3), random_density(3, seed=4)
    prod = DensityOperator(np.kron(ra, sb), [("A", 2), ("B", 3)])
    swapped = partial_trace(prod, ["B", "A"])
    assert swapped.names == ("B", "A")
    assert np.allclose(swapped.matrix, np.kron(sb, ra))


@given(st.integers(0, 10_000), st.floats(0, 1))
def test_partial_trace_linear_and_trace_preserving(seed, t):
    a = random_density(6, seed=seed)
    b = random_density(6, seed=seed + 7)
    mix = t * a + (1 - t) * b
    lhs = ptrace(mix, [2, 3], [1])
    rhs = t * ptrace(a, [2, 3], [1]) + (1 - t) * ptrace(b, [2, 3], [1])
    assert np.allclose(lhs, rhs, atol=1e-12)
    assert abs(np.trace(lhs).real - 1) <= 1e-12


@pytest.mark.parametrize("d, n, r", [(2, 2, 3), (2, 3, 4), (3, 2, 6)])
def test_symmetric_projector_rank(d, n, r):
    p, dim = symmetric_projector(d, n)
    assert dim == r == math.comb(n + d - 1, n)
    assert np.allclose(p @ p, p) and np.allclose(p, p.conj().T)
    assert round(np.trace(p).real) == r


def test_symmetric_projector_guard():
    with pytest.raises(DimensionError):
        symmetric_projector(2, 13)


def test_haar_samples():
    p = haar_sample("projector", 4, seed=7, rank=2)
    assert np.allclose(p @ p, p, atol=1e-12) and np.trace(p).real == pytest.approx(2)
    v = haar_sample("state", 2, seed=1)
    assert np.linalg.norm(v) == pytest.approx(1)
    u = haar_sample("unitary", 3, seed=2)
    assert np.allclose(u.conj().T @ u, np.eye(3))
    assert np.array_equal(haar_sample("unitary", 3, seed=2), u)
    with pytest.raises(DimensionError):
        haar_sample("projector", 2, seed=0, rank=3)


def test_haar_state_first_moment():
    rng = np.random.default_rng(0)
    vs = np.array([haar_sample("state", 2, rng) for _ in range(10_000)])
    mean = np.einsum("ki,kj->ij", vs, vs.conj()) / len(vs)
    assert trace_distance(mean, np.eye(2) / 2) <= 0.02


@pytest.mark.parametrize("rho, expected", [
    (np.eye(2) / 2, 1.0),
    (KET0, 0.0),
    (np.diag([0.9, 0.1]), math.log2(10)),
])
def test_generalized_inverse_lognorm(rho, expected):
    assert generalized_inverse_lognorm(rho) == pytest.approx(expected, abs=1e-12)


def test_generalized_inverse_lognorm_zero():
    with pytest.raises(ValueError):
        generalized_inverse_lognorm(np.zeros((2, 2)))


def test_purify_reproduces_state():
    rho = random_density(4, seed=5, rank_=2)
    m = purify(rho)
    assert m.shape == (4, 2)
    assert np.allclose(m @ m.conj().T, rho)


def test_kron_and_max_entangled():
    assert kron(np.eye(2), np.eye(3)).shape == (6, 6)
    phi = max_entangled(3)
    assert np.linalg.norm(phi) == pytest.approx(1)
    assert np.allclose(ptrace(np.outer(phi, phi.conj()), [3, 3], [0]), np.eye(3) / 3)
