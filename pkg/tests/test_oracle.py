import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from spherespec.errors import ConvergenceError, DomainError
from spherespec.kernels import (
    ExplicitCoefficients,
    Gaussian,
    Multiquadric,
    PointwiseZonal,
    catalog_coefficients,
    expand,
)
from spherespec.oracle import (
    OMEGA_2,
    assemble,
    azimuthal_blocks,
    build_grid,
    cluster_sizes,
    compare_spectra,
    eigs_symmetric,
    jacobi_eigenvalues,
    numpy_profile,
    nystrom_eigenvalues,
    nystrom_identities,
    oracle_check,
    reduce_circulant,
)
from spherespec.spectra import eigenvalue_blocks, hs_norm


@pytest.mark.parametrize("res", [(2, 4), (7, 9), (20, 40)])
def test_grid_weights_and_points(res):
    g = build_grid(*res)
    assert g.size == res[0] * res[1]
    assert abs(g.weights.sum() - OMEGA_2) < 2 ** -40 * OMEGA_2
    assert np.max(np.abs(np.linalg.norm(g.points, axis=1) - 1)) < 2 ** -40
    assert np.all(g.weights > 0)


def test_grid_moments():
    g = build_grid(3, 8)
    z = g.points[:, 2]
    assert abs(np.sum(g.weights * z ** 2) / OMEGA_2 - 1 / 3) < 1e-14
    p2 = (3 * z ** 2 - 1) / 2
    assert abs(np.sum(g.weights * p2 ** 2) / OMEGA_2 - 1 / 5) < 1e-14


@pytest.mark.parametrize("res", [(1, 8), (4, 3)])
def test_grid_rejects_degenerate(res):
    with pytest.raises(DomainError):
        build_grid(*res)


def test_constant_kernel_rank_one():
    g = build_grid(6, 12)
    ev = eigs_symmetric(assemble(lambda t: np.ones_like(t), g))
    assert abs(ev[0] - 1) < 1e-13
    assert np.max(np.abs(ev[1:])) < 1e-13


def test_linear_kernel_eigenvalues():
    g = build_grid(6, 12)
    ev = eigs_symmetric(assemble(lambda t: t, g))
    assert np.allclose(ev[:3], 1 / 3, atol=1e-13)
    assert np.max(np.abs(ev[3:])) < 1e-13


def test_multiquadric_top_eigenvalue():
    g = build_grid(20, 40)
    ev = nystrom_eigenvalues(numpy_profile(Multiquadric(1, 0.5)), g)
    assert abs(ev[0] - 0.5) < 1e-12


def test_eigs_small_examples():
    assert np.allclose(eigs_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]])), [3, 1], atol=1e-15)
    assert np.allclose(eigs_symmetric(np.eye(5)), np.ones(5))
    rng = np.random.default_rng(7)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    A = Q @ np.diag([5.0, 2.0, 2.0]) @ Q.T
    assert np.allclose(eigs_symmetric(0.5 * (A + A.T)), [5, 2, 2], atol=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 25))
def test_jacobi_matches_lapack(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    A = A + A.T
    ours = eigs_symmetric(A)
    ref = np.sort(np.linalg.eigvalsh(A))[::-1]
    assert np.max(np.abs(ours - ref)) <= 1e-12 * max(1.0, np.abs(ref).max())


def test_jacobi_batch_and_errors():
    rng = np.random.default_rng(3)
    stack = rng.standard_normal((4, 6, 6))
    stack = stack + stack.transpose(0, 2, 1)
    ev = jacobi_eigenvalues(stack)
    for A, e in zip(stack, ev):
        assert np.allclose(e, np.sort(np.linalg.eigvalsh(A))[::-1], atol=1e-12)
    with pytest.raises(DomainError):
        eigs_symmetric(stack[0], tol=0)
    with pytest.raises(ConvergenceError):
        eigs_symmetric(stack[0], max_sweeps=1)


def test_circulant_reduction_matches_dense():
    g = build_grid(6, 12)
    f = numpy_profile(Gaussian(1))
    dense = eigs_symmetric(assemble(f, g))
    fast = np.sort(jacobi_eigenvalues(reduce_circulant(azimuthal_blocks(f, g))).ravel())[::-1]
    assert np.max(np.abs(dense - fast)) < 1e-13


def test_compare_constant_kernel():
    E = catalog_coefficients(ExplicitCoefficients((1,)), 2, None, 64)
    g = build_grid(4, 8)
    ev = nystrom_eigenvalues(numpy_profile(None, E), g)
    c = compare_spectra(ev, eigenvalue_blocks(E), 1)
    assert c.max_rel_error < 1e-14


def test_multiquadric_clusters():
    spec = Multiquadric(1, 0.5)
    E = catalog_coefficients(spec, 2, 30, 128)
    ev = nystrom_eigenvalues(numpy_profile(spec), build_grid(30, 60))
    c = compare_spectra(ev, eigenvalue_blocks(E), 9)
    assert c.numeric_clusters == (1, 3, 5) and c.clusters_match
    assert c.max_rel_error < 1e-10


def test_compare_rejects_bad_k():
    E = catalog_coefficients(ExplicitCoefficients((1, 1)), 2, 1, 64)
    S = eigenvalue_blocks(E)
    with pytest.raises(DomainError):
        compare_spectra(np.ones(10), S, 5)
    with pytest.raises(DomainError):
        compare_spectra(np.ones(3), S, 4)


def test_cluster_sizes():
    assert cluster_sizes([3.0, 3.0, 1.0, 1.0 + 1e-9, 0.5]) == [2, 2, 1]


def test_frobenius_error_decreases_with_refinement():
    # delta close to 1 keeps the kernel peaked so every grid is under-resolved
    spec = Multiquadric(1, mpf("0.9"))
    E = catalog_coefficients(spec, 2, 1500, 128)
    exact = float(hs_norm(E))
    f = numpy_profile(spec)
    errs = [abs(nystrom_identities(f, build_grid(p, 2 * p))[1] - exact) / exact
            for p in (20, 40, 60)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_oracle_gaussian_small_grid():
    spec = Gaussian(1)
    E = expand(spec, 2, 30, 128)
    rep = oracle_check(spec, E, eigenvalue_blocks(E), build_grid(20, 40), 9)
    assert rep.comparison.clusters_match and rep.comparison.max_rel_error < 1e-10
    assert rep.trace_rel_error < 1e-12 and rep.frobenius_rel_error < 1e-12
    assert rep.positivity_ok


def test_oracle_from_expansion_only():
    E = expand(Gaussian(2), 2, 30, 128)
    rep = oracle_check(None, E, eigenvalue_blocks(E), build_grid(16, 32), 4)
    assert rep.comparison.max_rel_error < 1e-10


def test_oracle_pointwise_kernel():
    spec = PointwiseZonal(lambda t: 1 + t * t, label="quadratic")
    E = expand(spec, 2, 4, 128)
    f = numpy_profile(spec)
    ev = nystrom_eigenvalues(f, build_grid(6, 12))
    c = compare_spectra(ev, eigenvalue_blocks(E), 4)
    assert c.max_rel_error < 1e-12


def test_oracle_rejects_higher_spheres():
    E = expand(Gaussian(1), 3, 10, 64)
    with pytest.raises(DomainError):
        oracle_check(Gaussian(1), E, eigenvalue_blocks(E), build_grid(4, 8), 2)
