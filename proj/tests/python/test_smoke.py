import json

import numpy as np
import pytest
import scipy.sparse as sp

import amgf


def laplacian_2d(k):
    t = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(k, k))
    return (sp.kron(sp.identity(k), t) + sp.kron(t, sp.identity(k))).tocsr()


def test_csr_round_trip_and_matvec():
    ref = laplacian_2d(6)
    a = amgf.from_scipy(ref)
    assert a.shape == (36, 36)
    assert a.nnz == ref.nnz
    x = np.linspace(0.0, 1.0, 36)
    np.testing.assert_allclose(a @ x, ref @ x, atol=1e-14)
    indptr, indices, data = a.csr()
    np.testing.assert_array_equal(indptr, ref.indptr)


def test_invalid_csr_raises():
    with pytest.raises(amgf.SizeError):
        amgf.SparseMatrix(2, 2, [0, 1], [0], np.ones(1))


def test_amg_pcg_converges():
    a = amgf.from_scipy(laplacian_2d(24))
    h = amgf.amg_setup(a, coarsest_size=16)
    assert h.num_levels >= 2
    b = np.ones(a.shape[0])
    x, its, ok = amgf.pcg(a, h, b, tol=1e-8)
    assert ok and its < 40
    assert np.linalg.norm(a @ x - b) <= 1e-6 * np.linalg.norm(b)


def test_filtered_preconditioner_certificate():
    ref = laplacian_2d(8)
    ref = ref + sp.diags(np.where(np.arange(64) < 8, 1e6, 0.0))
    a = amgf.from_scipy(ref)
    h = amgf.amg_setup(a, coarsest_size=8)
    contact = list(range(8))
    m = amgf.FilteredPreconditioner(a, h, contact)
    x, its, ok = amgf.pcg(a, m, np.ones(64))
    assert ok
    rep = amgf.certify_amgf(a, h, contact)
    assert rep["lower_bound_holds"] and rep["upper_bound_holds"]
    assert rep["kappa"] <= rep["bound"]


def test_experiment_config_errors():
    with pytest.raises(amgf.ConfigError):
        amgf.run_experiment(json.dumps({"kind": "two_block", "levels": []}))


def test_sweep_runs():
    out = amgf.run_experiment(json.dumps({"kind": "synthetic_sweep", "levels": [0], "cond_max": 1e6}))
    assert out["summary_csv"].startswith("kind,level")
    assert len(out["iterations_csv"].splitlines()) > 1
