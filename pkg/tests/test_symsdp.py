import math

import numpy as np
import pytest

from qconv.degradable import extract_symmetric_channel, schur_direct_dilation
from qconv.matqi import DimensionError, haar_state, ptrace, random_density
from qconv.symsdp import (
    DualCandidate,
    SymmetryError,
    build_multisymmetric,
    commutant_residual,
    dual_bound,
    load_pool,
    load_records,
    primal_value,
    save_pool,
    save_records,
    search,
    symmetry_reduce,
    zero_candidate,
)
from qconv.entropies import smooth_hmin_purified_dual

DEPHASING_GRAM = np.array([[1.0, 0.6], [0.6, 1.0]])  # Z_0.2 as a Schur multiplier


@pytest.fixture(scope="module")
def ext():
    return extract_symmetric_channel(schur_direct_dilation(DEPHASING_GRAM))


def singlet_w():
    return np.array([[0.0], [1.0], [-1.0], [0.0]]) / math.sqrt(2)


def test_single_copy_symmetry(ext):
    st = build_multisymmetric(ext.W, ext.chi, 1)
    assert max(st.symmetry_residuals()) <= 1e-9


def test_two_copies_product(ext):
    st = build_multisymmetric(ext.W, ext.chi, 2)
    res = st.symmetry_residuals()
    assert len(res) == 2 and max(res) <= 1e-9
    assert np.linalg.norm(st.psi) == pytest.approx(1)
    assert (0, 1) in st.invariant_permutations() and (1, 0) in st.invariant_permutations()


def test_antisymmetric_isometry():
    st = build_multisymmetric(singlet_w(), np.ones(1), 2)
    assert max(st.symmetry_residuals()) <= 1e-12
    # the generator flips the sign of ψ but not of ψψ^dag
    v = st.swap_generator(0) @ st.psi
    assert np.allclose(v, -st.psi)


def test_rejects_asymmetric_isometry():
    w = np.zeros((4, 1))
    w[1, 0] = 1
    with pytest.raises(SymmetryError):
        build_multisymmetric(w, np.ones(1), 1)


def test_scope_guard(ext):
    with pytest.raises(DimensionError):
        build_multisymmetric(ext.W, ext.chi, 4)
    with pytest.raises(DimensionError):
        build_multisymmetric(ext.W, np.ones(3), 1)


def test_zero_candidate_feasible(ext):
    st = build_multisymmetric(ext.W, ext.chi, 1)
    ok, val, _ = dual_bound(st, 0.75, zero_candidate(st))
    assert ok and val == 0


def optimal(st, delta):
    sol = smooth_hmin_purified_dual(st.psi, st.dims, delta)
    return DualCandidate(sol.r, sol.s, sol.X)


@pytest.mark.parametrize("eps", [0.3, 0.5])
def test_optimal_candidate_matches_primal(ext, eps):
    st = build_multisymmetric(ext.W, ext.chi, 1)
    delta = 1 - eps ** 2
    ok, val, _ = dual_bound(st, delta, optimal(st, delta), tol=1e-7)
    assert ok
    assert val == pytest.approx(primal_value(st, eps)[0], abs=1e-6)


def perturbed(cand, st, seed):
    # mixing in a random PSD X and rescaling keeps every constraint satisfied
    dg, de, _ = st.dims
    y = random_density(dg * de, seed=seed)
    k = np.linalg.norm(ptrace(y, [dg, de], [1]), 2)
    return DualCandidate(cand.r / (1 + k), cand.s / (1 + k), (cand.X + y) / (1 + k))


@pytest.mark.parametrize("seed", range(3))
def test_reduction_keeps_feasibility_and_value(ext, seed):
    st = build_multisymmetric(ext.W, ext.chi, 2)
    delta = 0.75
    cand = perturbed(optimal(st, delta), st, seed)
    ok, val, _ = dual_bound(st, delta, cand, tol=1e-7)
    assert ok
    red = symmetry_reduce(cand, st, delta, check=False)
    ok2, val2, _ = dual_bound(st, delta, red, tol=1e-7)
    assert ok2 and val2 >= val - 1e-9
    assert commutant_residual(red, st) <= 1e-9
    # weak duality against the primal
    assert primal_value(st, 0.5)[0] >= val2 - 1e-6


def test_reduction_fixed_point(ext):
    st = build_multisymmetric(ext.W, ext.chi, 2)
    red = symmetry_reduce(optimal(st, 0.75), st)
    again = symmetry_reduce(red, st)
    assert np.allclose(red.X, again.X, atol=1e-12)


def test_reduction_rejects_infeasible(ext):
    st = build_multisymmetric(ext.W, ext.chi, 1)
    dg, de, _ = st.dims
    bad = DualCandidate(5.0, 0.0, np.zeros((dg * de, dg * de)))
    with pytest.raises(ValueError):
        symmetry_reduce(bad, st, 0.75)


def test_search_strong_duality_and_io(ext, tmp_path):
    recs = search(ext.W, ext.chi, ns=(1, 2), eps=0.5)
    for r in recs:
        assert r.reduced_feasible
        assert r.reduced_value == pytest.approx(r.primal, abs=1e-6)
        assert r.target == pytest.approx(2 ** -math.sqrt(r.n))
    path = tmp_path / "records.json"
    save_records(recs, str(path))
    back = load_records(str(path))
    assert [b.to_dict() for b in back] == [r.to_dict() for r in recs]
    pool = [DualCandidate.from_dict(r.candidate) for r in recs]
    save_pool(pool, str(tmp_path / "pool.json"))
    again = load_pool(str(tmp_path / "pool.json"))
    assert all(np.allclose(a.X, b.X) for a, b in zip(pool, again))


def test_random_test_state_is_symmetric(ext):
    xi = haar_state(ext.dG ** 4, seed=3)
    st = build_multisymmetric(ext.W, xi, 2)
    assert max(st.symmetry_residuals()) <= 1e-9
