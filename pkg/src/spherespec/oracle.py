"""Brute-force Nystrom cross-check of analytic spectra on S^2.

The integral operator (1/omega_2) int K(x . y) f(y) dsigma(y) is discretised
on a Gauss-Legendre (polar cosine) x uniform (azimuth) product grid and the
symmetrised matrix sqrt(w_i w_j) K(x_i . x_j) / omega_2 is diagonalised with
cyclic Jacobi rotations.  Everything here is binary64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .kernels import Gaussian, Multiquadric, DotProduct, PointwiseZonal

OMEGA_2 = 4 * np.pi


@dataclass(frozen=True)
class SphereGrid:
    points: np.ndarray
    weights: np.ndarray
    resolution: tuple
    cos_theta: np.ndarray
    polar_weights: np.ndarray

    @property
    def size(self):
        return len(self.weights)


def build_grid(n_polar, n_azimuthal):
    """Product grid; point (i, k) is stored at flat position k * n_polar + i."""
    if n_polar < 2 or n_azimuthal < 4:
        raise DomainError(f"grid needs n_polar >= 2 and n_azimuthal >= 4, got {n_polar}x{n_azimuthal}")
    z, gw = np.polynomial.legendre.leggauss(n_polar)
    phi = 2 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    s = np.sqrt(1 - z * z)
    pts = np.empty((n_azimuthal, n_polar, 3))
    pts[:, :, 0] = np.cos(phi)[:, None] * s[None, :]
    pts[:, :, 1] = np.sin(phi)[:, None] * s[None, :]
    pts[:, :, 2] = z[None, :]
    w = np.tile(gw * (2 * np.pi / n_azimuthal), n_azimuthal)
    return SphereGrid(pts.reshape(-1, 3), w, (n_polar, n_azimuthal), z, gw)


@dataclass(frozen=True)
class SymmetricMatrix:
    entries: np.ndarray

    @property
    def order(self):
        return self.entries.shape[0]


def numpy_profile(spec, expansion=None):
    """Vectorised binary64 zonal profile f(t).

    Closed forms are used where the family has one; otherwise the truncated
    Legendre sum of ``expansion`` is evaluated.
    """
    if isinstance(spec, Gaussian):
        r = float(spec.r)
        return lambda t: np.exp(2 * np.asarray(t) / r)
    if isinstance(spec, Multiquadric):
        s, d = float(spec.sigma), float(spec.delta)
        return lambda t: s * s * (1 - d) / np.sqrt(1 + d * d - 2 * d * np.asarray(t))
    if isinstance(spec, Multiquadric) and expansion is not None and expansion.m != 2:
        raise DomainError("the oracle works on S^2 only")
    if isinstance(spec, DotProduct) and spec.finite:
        b = [float(x) for x in spec.b]
        return lambda t: np.polynomial.polynomial.polyval(np.asarray(t), b)
    if isinstance(spec, PointwiseZonal):
        return np.vectorize(lambda t: float(spec.f(t)))
    if expansion is None:
        raise DomainError("pointwise evaluation needs a kernel with a closed form or an expansion")
    if expansion.m != 2:
        raise DomainError("the oracle works on S^2 only")
    c = np.array([float(x) for x in expansion.coeffs])
    return lambda t: np.polynomial.legendre.legval(np.asarray(t), c)


def _clip(t):
    return np.clip(t, -1.0, 1.0)


def assemble(f, grid):
    """Dense symmetrised Nystrom matrix sqrt(w_i w_j) f(x_i . x_j) / omega_2."""
    G = _clip(grid.points @ grid.points.T)
    G = 0.5 * (G + G.T)
    sw = np.sqrt(grid.weights)
    A = sw[:, None] * f(G) * sw[None, :] / OMEGA_2
    return SymmetricMatrix(0.5 * (A + A.T))


def azimuthal_blocks(f, grid):
    """Blocks B_d (d = 0..n_az-1) of the block-circulant Nystrom matrix.

    Row block k, column block l of the dense matrix equals B_{(l-k) mod n_az}.
    """
    n_pol, n_az = grid.resolution
    z, s = grid.cos_theta, np.sqrt(1 - grid.cos_theta ** 2)
    w = grid.weights[:n_pol]
    sw = np.sqrt(w)
    cosd = np.cos(2 * np.pi * np.arange(n_az) / n_az)
    T = _clip(z[None, :, None] * z[None, None, :] + cosd[:, None, None] * s[None, :, None] * s[None, None, :])
    B = sw[None, :, None] * f(T) * sw[None, None, :] / OMEGA_2
    return 0.5 * (B + B.transpose(0, 2, 1))


def reduce_circulant(B):
    """Symmetric matrices M_q = sum_d B_d cos(2 pi d q / n) whose spectra union to A's.

    Valid because B_d is symmetric and B_d = B_{n-d}; the discrete Fourier
    transform in the azimuth index is an orthogonal change of basis.
    """
    n = B.shape[0]
    d = np.arange(n)
    C = np.cos(2 * np.pi * np.outer(d, d) / n)
    M = np.einsum("qd,dij->qij", C, B)
    return 0.5 * (M + M.transpose(0, 2, 1))


def _off_norm(A):
    off = A * (1.0 - np.eye(A.shape[-1]))
    return np.sqrt(np.sum(off * off, axis=(-2, -1)))


def jacobi_eigenvalues(stack, tol=1e-13, max_sweeps=60):
    """Cyclic Jacobi on a batch of symmetric matrices, shape (batch, n, n).

    Rotations for the pair (p, q) are applied to every matrix of the batch at
    once.  Sweeps stop when each off-diagonal Frobenius norm is below
    tol times the matrix's Frobenius norm.
    """
    A = np.array(stack, dtype=float, copy=True)
    if A.ndim == 2:
        A = A[None]
    nb, n, _ = A.shape
    fro = np.sqrt(np.sum(A * A, axis=(1, 2)))
    target = tol * np.where(fro > 0, fro, 1.0)
    batch = np.arange(nb)
    for sweep in range(max_sweeps):
        if np.all(_off_norm(A) <= target):
            return np.sort(np.einsum("bii->bi", A), axis=1)[:, ::-1]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                app, aqq = A[:, p, p], A[:, q, q]
                g = 100.0 * np.abs(apq)
                # entries below rounding of both diagonals are dropped outright
                negligible = (np.abs(app) + g == np.abs(app)) & (np.abs(aqq) + g == np.abs(aqq))
                active = (apq != 0) & ~negligible
                if not active.any():
                    A[batch, p, q] = 0.0
                    A[batch, q, p] = 0.0
                    continue
                theta = np.where(active, (aqq - app) / (2 * np.where(active, apq, 1.0)), 0.0)
                big = np.abs(theta) > 1e150
                safe = np.where(big, 1.0, theta)
                t = np.sign(safe) / (np.abs(safe) + np.sqrt(safe * safe + 1))
                t = np.where(big, 1 / (2 * np.where(big, theta, 1.0)), t)
                t = np.where(theta == 0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                colp = A[:, :, p].copy()
                colq = A[:, :, q].copy()
                A[:, :, p] = c[:, None] * colp - s[:, None] * colq
                A[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = A[:, p, :].copy()
                rowq = A[:, q, :].copy()
                A[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                A[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                A[batch, p, q] = 0.0
                A[batch, q, p] = 0.0
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def eigs_symmetric(A, tol=1e-13, max_sweeps=60):
    """All eigenvalues of a symmetric matrix, non-increasing."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    M = A.entries if isinstance(A, SymmetricMatrix) else np.asarray(A, dtype=float)
    return jacobi_eigenvalues(M, tol, max_sweeps)[0]


def nystrom_eigenvalues(f, grid, tol=1e-13):
    """Eigenvalues of the grid's Nystrom matrix via the azimuthal reduction."""
    M = reduce_circulant(azimuthal_blocks(f, grid))
    ev = jacobi_eigenvalues(M, tol)
    return np.sort(ev.ravel())[::-1]


def nystrom_identities(f, grid):
    """Trace and Frobenius norm of the Nystrom matrix, from its circulant blocks."""
    B = azimuthal_blocks(f, grid)
    n_az = grid.resolution[1]
    trace = n_az * np.trace(B[0])
    fro = np.sqrt(n_az * np.sum(B * B))
    return float(trace), float(fro)


def cluster_sizes(values, rel_tol=1e-6):
    """Sizes of runs of consecutive values that agree to ``rel_tol`` relative."""
    sizes = []
    for i, v in enumerate(values):
        if i > 0 and abs(v - values[i - 1]) <= rel_tol * max(abs(v), abs(values[i - 1])):
            sizes[-1] += 1
        else:
            sizes.append(1)
    return sizes


@dataclass(frozen=True)
class SpectrumComparison:
    k: int
    numeric: tuple
    analytic: tuple
    rel_errors: tuple
    max_rel_error: float
    numeric_clusters: tuple
    expected_clusters: tuple

    @property
    def clusters_match(self):
        return self.numeric_clusters == self.expected_clusters


def compare_spectra(numeric, analytic, k, cluster_tol=1e-6):
    """Relative errors of the top-k numeric eigenvalues against the sorted analytic spectrum."""
    if k < 1 or k > len(numeric):
        raise DomainError(f"k={k} outside 1..{len(numeric)}")
    if k > analytic.size:
        raise DomainError(f"k={k} beyond analytic truncation ({analytic.size} eigenvalues)")
    num = np.sort(np.asarray(numeric, dtype=float))[::-1][:k]
    ana = np.array([float(analytic.sorted_value(j)) for j in range(1, k + 1)])
    err = np.abs(num - ana) / np.where(ana != 0, np.abs(ana), 1.0)
    expected, taken = [], 0
    for b in analytic.sorted_blocks:
        if taken >= k:
            break
        size = min(b.multiplicity, k - taken)
        expected.append(size)
        taken += size
    return SpectrumComparison(k, tuple(num), tuple(ana), tuple(err), float(err.max()),
                              tuple(cluster_sizes(list(num), cluster_tol)), tuple(expected))


@dataclass(frozen=True)
class OracleReport:
    grid: tuple
    comparison: SpectrumComparison
    trace: float
    trace_expected: float
    trace_rel_error: float
    frobenius: float
    frobenius_expected: float
    frobenius_rel_error: float
    min_eigenvalue: float
    positivity_ok: bool


def oracle_check(spec, expansion, spectrum, grid, k, tol=1e-13):
    """Full cross-check: eigenvalues, clusters, trace and Frobenius identities."""
    from mpmath import mp
    from .spectra import hs_norm

    if expansion.m != 2 or spectrum.m != 2:
        raise DomainError("the oracle works on S^2 only")
    f = numpy_profile(spec, expansion)
    ev = nystrom_eigenvalues(f, grid, tol)
    comp = compare_spectra(ev, spectrum, k)
    trace, fro = nystrom_identities(f, grid)
    with mp.workprec(expansion.precision):
        tr_exp = float(mp.fsum(expansion.coeffs))
    fro_exp = float(hs_norm(expansion))
    return OracleReport(
        grid.resolution, comp, trace, tr_exp, abs(trace - tr_exp) / abs(tr_exp),
        fro, fro_exp, abs(fro - fro_exp) / fro_exp, float(ev.min()),
        bool(ev.min() >= -1e-10 * fro))
