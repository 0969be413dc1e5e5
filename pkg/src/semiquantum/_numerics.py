"""Low-level numerical kernels: coherent amplitudes, Hermite and Laguerre
functions, quadrature weights."""

import numpy as np
from scipy.special import gammaln


def coherent_amplitudes(alpha, dim):
    """Fock amplitudes <m|alpha> for m < dim, shape ``alpha.shape + (dim,)``.

    Built by the product recurrence c_m = c_{m-1} alpha / sqrt(m), which never
    forms alpha**m or m! explicitly.
    """
    alpha = np.asarray(alpha, dtype=complex)
    out = np.empty(alpha.shape + (dim,), dtype=complex)
    out[..., 0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for m in range(1, dim):
        out[..., m] = out[..., m - 1] * alpha / np.sqrt(m)
    return out


def hermite_functions(x, dim):
    """Normalized oscillator eigenfunctions psi_m(x), shape ``(dim, len(x))``.

    Scaled so that |psi_0|^2 is a Gaussian of variance 1/4.
    """
    xi = np.sqrt(2.0) * np.asarray(x, dtype=float)
    out = np.empty((dim,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi**2)
    if dim > 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for m in range(1, dim - 1):
        out[m + 1] = np.sqrt(2.0 / (m + 1)) * xi * out[m] - np.sqrt(m / (m + 1)) * out[m - 1]
    return out * 2.0**0.25


def laguerre_functions(x, k, nmax):
    """f_n(x) = sqrt(n!/(n+k)!) x^(k/2) e^(-x/2) L_n^(k)(x) for n = 0..nmax-1.

    Three-term recurrence on the normalized functions; stable for the
    arguments met in phase-space work (x up to a few hundred).
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((nmax,) + x.shape)
    if nmax == 0:
        return out
    with np.errstate(divide="ignore"):
        logx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
    if k == 0:
        out[0] = np.exp(-0.5 * x)
    else:
        out[0] = np.exp(0.5 * k * logx - 0.5 * x - 0.5 * gammaln(k + 1))
    if nmax > 1:
        out[1] = (1 + k - x) * out[0] / np.sqrt(1 + k)
    for n in range(1, nmax - 1):
        out[n + 1] = ((2 * n + 1 + k - x) * out[n] - np.sqrt(n * (n + k)) * out[n - 1]) / np.sqrt(
            (n + 1) * (n + k + 1)
        )
    return out


def uniform_step(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be one-dimensional with at least two points")
    steps = np.diff(grid)
    h = steps.mean()
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise ValueError("grid must be uniform and increasing")
    return h


def trapezoid_weights(grid):
    h = uniform_step(grid)
    w = np.full(len(grid), h)
    w[0] = w[-1] = 0.5 * h
    return w


def simpson_weights(grid):
    """Composite Simpson weights; an even point count closes with one
    trapezoid panel."""
    h = uniform_step(grid)
    n = len(grid)
    if n < 3:
        return trapezoid_weights(grid)
    m = n if n % 2 == 1 else n - 1
    w = np.zeros(n)
    w[:m:2] = 2.0
    w[1:m:2] = 4.0
    w[0] = w[m - 1] = 1.0
    w[:m] *= h / 3.0
    if m < n:
        w[-2] += 0.5 * h
        w[-1] += 0.5 * h
    return w
