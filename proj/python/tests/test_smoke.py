import numpy as np
import pytest

import hsolve


def test_aniso_matches_closed_form_spectrum():
    n, eps = 6, 1e-2
    A = hsolve.gen_aniso2d(n, eps)
    assert A.n == n * n
    computed = np.linalg.eigvalsh(A.to_dense())
    closed = sorted(hsolve.aniso_eigenvalue(n, eps, i, j) for i in range(1, n + 1) for j in range(1, n + 1))
    np.testing.assert_allclose(computed, closed, rtol=1e-10)


def test_eps_zero_factorization_is_exact():
    A = hsolve.gen_aniso2d(16, 1e-2)
    fac = hsolve.factor(A, hsolve.SolverConfig(eps=0.0, cluster_size=16, stop_size=64))
    assert fac.levels >= 2
    b = np.random.default_rng(0).standard_normal(A.n)
    x = fac.solve(b)
    oracle = np.linalg.solve(A.to_dense(), b)
    assert np.linalg.norm(x - oracle) <= 1e-10 * np.linalg.norm(oracle)


def test_pcg_with_hierarchical_preconditioner():
    A = hsolve.gen_aniso2d(48, 1e-4)
    fac = hsolve.factor(A, hsolve.SolverConfig(eps=1e-2, cluster_size=32, stop_size=128))
    b = A.matvec(np.ones(A.n))
    x, report = hsolve.pcg(A, b, fac, tol=1e-10)
    assert report["converged"]
    _, plain = hsolve.pcg(A, b, None, tol=1e-10)
    assert report["iterations"] < plain["iterations"]
    np.testing.assert_allclose(x, np.ones(A.n), atol=1e-6)
    ops = hsolve.spd_operator_check(fac, trials=20)
    assert ops["passed"]


def test_gmres_and_ic0():
    A = hsolve.gen_aniso2d(10, 0.1)
    b = np.arange(A.n, dtype=float)
    x, report = hsolve.gmres(A, b, "ic0", restart=20, tol=1e-10)
    assert report["converged"]
    assert np.linalg.norm(A.matvec(x) - b) <= 1.1e-10 * np.linalg.norm(b)


def test_extruded_with_column_map():
    A, cols = hsolve.gen_extruded3d(6, 6, 4, 1e3, 0.5)
    assert cols.column_count() == 36
    cfg = hsolve.SolverConfig(eps=1e-2, cluster_size=16, stop_size=32, partitioner="extruded")
    fac = hsolve.factor(A, cfg, cols)
    _, report = hsolve.pcg(A, A.matvec(np.ones(A.n)), fac)
    assert report["converged"]


def test_scipy_round_trip():
    scipy_sparse = pytest.importorskip("scipy.sparse")
    A = hsolve.gen_aniso2d(5, 0.3)
    S = hsolve.to_scipy(A)
    assert isinstance(S, scipy_sparse.csr_matrix)
    B = hsolve.from_scipy(S)
    np.testing.assert_array_equal(B.to_dense(), A.to_dense())


def test_verification_suites():
    assert hsolve.props_suite(trials=5, seed=1)["passed"]
    assert hsolve.corollary_suite(trials=5, seed=1)["passed"]
    ex = hsolve.exactness_suite(trials=1, seed=1)
    assert ex["passed"] and len(ex["cases"]) == 2


def test_errors_are_typed(tmp_path):
    with pytest.raises(hsolve.IoError):
        hsolve.load_matrix_market(str(tmp_path / "missing.mtx"))
    with pytest.raises(hsolve.NotSymmetric):
        hsolve.from_csr(2, [0, 2, 3], [0, 1, 1], [1.0, 0.5, 1.0])
    with pytest.raises(hsolve.InvalidArgument):
        hsolve.SolverConfig(eps=-1.0)
    with pytest.raises(hsolve.HsolveError):
        hsolve.gen_aniso2d(0, 1.0)
