"""Phase-space quasi-probabilities: Husimi Q of one and two modes, the Wigner
function by its Laguerre expansion, and Q of explicitly classical ensembles.

Normalization: every field here integrates to one over d^2 alpha, with
alpha = x + i y and d^2 alpha = dx dy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._numerics import coherent_amplitudes, laguerre_functions, trapezoid_weights
from .errors import DomainError, GridCoverageError
from .fock import photon_number_moments

# exp(-|alpha|^2) underflows past this; beyond it Q carries no information
MAX_ABS_ALPHA_SQ = 700.0
Q_NORM_TOL = 1e-4
_CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class PhaseSpaceField:
    """Real samples on a rectangular alpha grid, ``values[i, j]`` at
    ``x[i] + 1j * y[j]``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if x.size < 2 or y.size < 2:
            raise ValueError("phase-space grid needs at least two points per axis")
        if values.shape != (x.size, y.size):
            raise ValueError(f"values shape {values.shape} does not match grid {(x.size, y.size)}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("grid ranges must be finite")
        for name, arr in (("x", x), ("y", y), ("values", values)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def x_range(self):
        return (float(self.x[0]), float(self.x[-1]))

    @property
    def y_range(self):
        return (float(self.y[0]), float(self.y[-1]))

    @property
    def nx(self):
        return self.x.size

    @property
    def ny(self):
        return self.y.size

    @property
    def weight(self):
        """Cell area dx * dy."""
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def integral(self):
        return float(trapezoid_weights(self.x) @ self.values @ trapezoid_weights(self.y))

    def alpha(self):
        return self.x[:, None] + 1j * self.y[None, :]


@dataclass(frozen=True)
class GridSpec:
    x_range: tuple
    y_range: tuple
    nx: int = 201
    ny: int = 201

    def axes(self):
        return np.linspace(*self.x_range, self.nx), np.linspace(*self.y_range, self.ny)

    @classmethod
    def square(cls, half_width, n=201, center=0j):
        c = complex(center)
        return cls((c.real - half_width, c.real + half_width), (c.imag - half_width, c.imag + half_width), n, n)


def suggest_grid(rho, n=201):
    """Square grid about the origin with half-width 3 + 2 sqrt(<n> + 1)."""
    mean, _ = photon_number_moments(rho)
    return GridSpec.square(3.0 + 2.0 * np.sqrt(mean + 1.0), n)


def _check_alpha(alpha):
    worst = np.max(np.abs(alpha)) ** 2 if np.size(alpha) else 0.0
    if worst > MAX_ABS_ALPHA_SQ:
        raise DomainError(f"|alpha|^2 = {worst:.1f} exceeds {MAX_ABS_ALPHA_SQ:g}; coherent overlap underflows")


def husimi_q(rho, alpha):
    """Q(alpha) = <alpha|rho|alpha> / pi, vectorized over ``alpha``."""
    alpha = np.asarray(alpha, dtype=complex)
    _check_alpha(alpha)
    weights, vecs = rho.pure_components()
    flat = alpha.ravel()
    out = np.empty(flat.shape)
    for start in range(0, flat.size, _CHUNK):
        c = coherent_amplitudes(flat[start : start + _CHUNK], rho.dim)
        overlaps = c.conj() @ vecs
        out[start : start + _CHUNK] = (np.abs(overlaps) ** 2) @ weights
    return out.reshape(alpha.shape) / np.pi


def husimi_q_point(rho, alpha):
    return float(husimi_q(rho, complex(alpha)))


def husimi_q_grid(rho, grid=None):
    """Q sampled on ``grid`` (a GridSpec; auto-sized when omitted).

    Raises GridCoverageError when the trapezoid integral misses 1 by more
    than 1e-4.
    """
    grid = suggest_grid(rho) if grid is None else grid
    x, y = grid.axes()
    values = husimi_q(rho, x[:, None] + 1j * y[None, :])
    q = PhaseSpaceField(x, y, values)
    total = q.integral()
    if abs(total - 1.0) > Q_NORM_TOL:
        raise GridCoverageError(f"Q integrates to {total:.6f} on the grid", deficit=1.0 - total)
    return q


def two_mode_husimi_q(state, alpha1, alpha2):
    """Q(alpha1, alpha2) = <alpha1, alpha2|rho|alpha1, alpha2> / pi^2,
    broadcasting ``alpha1`` against ``alpha2``."""
    a1, a2 = np.broadcast_arrays(np.asarray(alpha1, dtype=complex), np.asarray(alpha2, dtype=complex))
    _check_alpha(a1)
    _check_alpha(a2)
    weights, vecs = state.pure_components()
    d = state.dim
    c1 = coherent_amplitudes(a1.ravel(), d).conj()
    c2 = coherent_amplitudes(a2.ravel(), d).conj()
    out = np.zeros(a1.size)
    for w, v in zip(weights, vecs.T):
        amp = np.einsum("pm,mn,pn->p", c1, v.reshape(d, d), c2)
        out += w * np.abs(amp) ** 2
    return out.reshape(a1.shape) / np.pi**2


def wigner_oracle(rho, alpha):
    """Wigner function from the Fock-basis Laguerre expansion.

    W(alpha) = sum_{m,n} rho_{mn} W_{|m><n|}(alpha) with, for m = n + k,
    W_{|m><n|} = (2/pi) (-1)^n sqrt(n!/m!) (2 alpha^*)^k e^{-2|alpha|^2}
    L_n^(k)(4|alpha|^2). Normalized to integrate to one; may be negative.
    """
    alpha = np.asarray(alpha, dtype=complex)
    if np.size(alpha) and 2.0 * np.max(np.abs(alpha)) ** 2 > MAX_ABS_ALPHA_SQ:
        raise DomainError("alpha too large for the Laguerre expansion")
    x = 4.0 * np.abs(alpha) ** 2
    phase = np.exp(1j * np.angle(alpha))
    rho_m = rho.matrix
    d = rho.dim
    sign = (-1.0) ** np.arange(d)
    total = np.zeros(alpha.shape)
    for k in range(d):
        nmax = d - k
        f = laguerre_functions(x, k, nmax)
        coeff = np.array([rho_m[n + k, n] for n in range(nmax)]) * sign[:nmax]
        term = np.tensordot(coeff, f, axes=1)
        if k == 0:
            total += term.real
        else:
            # |m><n| and its conjugate partner |n><m| contribute a real pair
            total += 2.0 * (term * phase.conj() ** k).real
    return 2.0 / np.pi * total


def wigner_grid(rho, grid):
    x, y = grid.axes()
    return PhaseSpaceField(x, y, wigner_oracle(rho, x[:, None] + 1j * y[None, :]))


@dataclass(frozen=True)
class CoherentPoint:
    beta: complex


@dataclass(frozen=True)
class GaussianComponent:
    """Isotropic Gaussian P function: mean ``beta``, ``variance`` per real axis."""

    beta: complex
    variance: float

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError("Gaussian component variance must be positive; use CoherentPoint for zero")


@dataclass(frozen=True)
class ClassicalEnsemble:
    """Nonnegative P function made of point masses and isotropic Gaussians."""

    weights: tuple
    components: tuple = field(default=())

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.components) or len(w) == 0:
            raise ValueError("need one weight per component")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def coherent(cls, beta):
        return cls((1.0,), (CoherentPoint(complex(beta)),))

    @classmethod
    def thermal(cls, nbar, beta=0j):
        if nbar == 0:
            return cls.coherent(beta)
        return cls((1.0,), (GaussianComponent(complex(beta), 0.5 * nbar),))

    def q_gaussians(self):
        """(weights, means, variances) of Q as an isotropic Gaussian mixture:
        each P component is widened by the vacuum variance 1/2 per axis."""
        means = np.array([c.beta for c in self.components], dtype=complex)
        var = np.array([getattr(c, "variance", 0.0) + 0.5 for c in self.components])
        return np.asarray(self.weights), means, var


def q_from_classical_ensemble(ens, alpha):
    """Closed-form Q of a classical ensemble, vectorized over ``alpha``."""
    alpha = np.asarray(alpha, dtype=complex)
    weights, means, var = ens.q_gaussians()
    out = np.zeros(alpha.shape)
    for w, m, v in zip(weights, means, var):
        out += w * np.exp(-np.abs(alpha - m) ** 2 / (2.0 * v)) / (2.0 * np.pi * v)
    return out


def ensemble_density_matrix(ens, params):
    """Density matrix whose P function is the ensemble."""
    from .fock import make_coherent_state, make_displaced_thermal_state, mixture

    states = []
    for c in ens.components:
        if isinstance(c, CoherentPoint):
            states.append(make_coherent_state(c.beta, params))
        else:
            states.append(make_displaced_thermal_state(c.beta, 2.0 * c.variance, params))
    return mixture(states, ens.weights)


def gaussian_smooth_field(field_, variance=0.25):
    """Separable Gaussian convolution of a field (trapezoid rule per axis);
    with variance 1/4 this maps a Wigner function onto Q."""
    kx = _smoothing_matrix(field_.x, variance)
    ky = _smoothing_matrix(field_.y, variance)
    return PhaseSpaceField(field_.x, field_.y, kx @ field_.values @ ky.T)


def _smoothing_matrix(grid, variance):
    diff = grid[:, None] - grid[None, :]
    kernel = np.exp(-(diff**2) / (2.0 * variance)) / np.sqrt(2.0 * np.pi * variance)
    return kernel * trapezoid_weights(grid)[None, :]


def two_mode_husimi_q_outer(state, alpha1, alpha2):
    """Two-mode Q on the outer product of two 1-D sets of points:
    ``out[i, j] = Q(alpha1[i], alpha2[j])``."""
    alpha1 = np.asarray(alpha1, dtype=complex).ravel()
    alpha2 = np.asarray(alpha2, dtype=complex).ravel()
    _check_alpha(alpha1)
    _check_alpha(alpha2)
    d = state.dim
    weights, vecs = state.pure_components()
    c2 = coherent_amplitudes(alpha2, d).conj().T
    out = np.zeros((alpha1.size, alpha2.size))
    rows = max(1, _CHUNK * 8 // max(alpha2.size, 1))
    for start in range(0, alpha1.size, rows):
        c1 = coherent_amplitudes(alpha1[start : start + rows], d).conj()
        block = np.zeros((c1.shape[0], alpha2.size))
        for w, v in zip(weights, vecs.T):
            block += w * np.abs(c1 @ v.reshape(d, d) @ c2) ** 2
        out[start : start + rows] = block
    return out / np.pi**2
