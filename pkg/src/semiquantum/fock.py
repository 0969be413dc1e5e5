"""Single- and two-mode states in a truncated Fock basis.

Quadratures follow X_theta = (a e^{-i theta} + a^dagger e^{i theta}) / 2, so
the vacuum variance is exactly 1/4 and "squeezed" means a variance below 1/4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from ._numerics import hermite_functions, laguerre_functions, trapezoid_weights, uniform_step
from .errors import DomainError, GridCoverageError, TruncationError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

DEFAULT_QUADRATURE_HALF_WIDTH = 6.0
DEFAULT_QUADRATURE_STEP = 0.01


@dataclass(frozen=True)
class FockParams:
    dim: int
    tail_tol: float = 1e-10

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dim must be an integer >= 2, got {self.dim}")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol}")


def _freeze(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix over |0>..|dim-1>.

    The edge-occupation gate is enforced by the constructors of states with
    unbounded photon-number support, not here: a number state sitting on the
    last retained level is represented exactly.
    """

    matrix: np.ndarray

    def __post_init__(self):
        rho = _freeze(self.matrix)
        object.__setattr__(self, "matrix", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
            raise ValueError(f"density matrix must be square with dim >= 2, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) >= HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(rho).real!r} differs from 1")
        if self.eigenvalues[0] < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {self.eigenvalues[0]:.3e}")

    @classmethod
    def from_pure(cls, amplitudes):
        psi = np.asarray(amplitudes, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    @cached_property
    def _eig(self):
        vals, vecs = np.linalg.eigh(self.matrix)
        return vals, vecs

    def pure_components(self, cutoff=1e-15):
        """(weights, vectors) of the spectral decomposition, dropping weights
        below ``cutoff``; vectors are columns."""
        vals, vecs = self._eig
        keep = vals > cutoff
        return vals[keep], vecs[:, keep]

    @property
    def edge_occupation(self):
        return self.matrix[-1, -1].real


def mixture(states, weights):
    """Convex combination of density matrices of equal dimension."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise ValueError(f"states have different dimensions {sorted(dims)}")
    return DensityMatrix(sum(w * s.matrix for w, s in zip(weights, states)))


def _gate(level_probs, params, what):
    """Enforce the truncation tail gate given photon-number probabilities on
    levels 0..L-1 of the untruncated state (L well beyond ``params.dim``)."""
    tails = np.concatenate([np.cumsum(level_probs[::-1])[::-1], [0.0]])
    tol = params.tail_tol

    def ok(d):
        return tails[d] <= tol and level_probs[d - 1] <= tol

    if ok(params.dim):
        return
    required = next((d for d in range(2, len(level_probs)) if ok(d)), None)
    raise TruncationError(
        f"{what}: weight {tails[params.dim]:.3e} beyond level {params.dim - 1} "
        f"(edge {level_probs[params.dim - 1]:.3e}) exceeds tail_tol={tol:g}; "
        f"need dim >= {required}",
        required_dim=required,
    )


def make_number_state(m, params):
    if m < 0 or int(m) != m:
        raise ValueError(f"photon number must be a nonnegative integer, got {m}")
    if m >= params.dim:
        raise TruncationError(f"|{m}> does not fit in dim={params.dim}", required_dim=m + 1)
    rho = np.zeros((params.dim, params.dim), dtype=complex)
    rho[m, m] = 1.0
    return DensityMatrix(rho)


def make_coherent_state(beta, params):
    beta = complex(beta)
    mean = abs(beta) ** 2
    levels = max(params.dim, int(mean + 20 * np.sqrt(mean) + 60)) + 1
    m = np.arange(levels)
    if beta == 0:
        amps = (m == 0).astype(complex)
    else:
        log_abs = m * np.log(abs(beta)) - 0.5 * gammaln(m + 1) - 0.5 * mean
        amps = np.exp(log_abs + 1j * m * np.angle(beta))
    _gate(np.abs(amps) ** 2, params, f"coherent beta={beta}")
    amps = amps[: params.dim]
    return DensityMatrix.from_pure(amps / np.linalg.norm(amps))


def make_squeezed_vacuum(r, params):
    """Vacuum squeezed along X_0: variance e^{-2r}/4 at theta=0."""
    r = float(r)
    t = np.tanh(abs(r))
    decay = -2.0 * np.log(t) if t > 0 else np.inf
    kmax = max(params.dim, int(80.0 / min(decay, 80.0)) + 20)
    k = np.arange(kmax)
    amps = np.zeros(2 * kmax, dtype=complex)
    if r == 0.0:
        amps[0] = 1.0
    else:
        # |c_{2k}|^2 = tanh(r)^{2k} (2k)! / (4^k k!^2 cosh r)
        logp = gammaln(2 * k + 1) - 2 * gammaln(k + 1) - k * np.log(4.0) - np.log(np.cosh(r)) + 2 * k * np.log(t)
        amps[0::2] = np.exp(0.5 * logp) * (-np.sign(r)) ** k
    _gate(np.abs(amps) ** 2, params, f"squeezed r={r}")
    amps = amps[: params.dim]
    return DensityMatrix.from_pure(amps / np.linalg.norm(amps))


def make_thermal_state(nbar, params):
    nbar = float(nbar)
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    if nbar == 0:
        probs = np.zeros(params.dim)
        probs[0] = 1.0
    else:
        q = nbar / (1.0 + nbar)
        levels = max(params.dim, int(60.0 / -np.log(q)) + 10) + 1
        probs = q ** np.arange(levels) / (1.0 + nbar)
        _gate(probs, params, f"thermal nbar={nbar}")
        probs = probs[: params.dim]
    probs = probs / probs.sum()
    return DensityMatrix(np.diag(probs).astype(complex))


def displacement_matrix(beta, dim, columns=None):
    """Matrix elements <m|D(beta)|n> for m < dim and n < columns."""
    columns = dim if columns is None else columns
    beta = complex(beta)
    x = abs(beta) ** 2
    phase = np.exp(1j * np.angle(beta))
    out = np.zeros((dim, columns), dtype=complex)
    size = max(dim, columns)
    for k in range(size):
        f = laguerre_functions(x, k, size)
        for n in range(size):
            m = n + k
            if m < dim and n < columns:
                out[m, n] = f[n] * phase**k
            if k and n < dim and m < columns:
                out[n, m] = f[n] * (-phase.conjugate()) ** k
    return out


def make_displaced_thermal_state(beta, nbar, params):
    """D(beta) rho_thermal(nbar) D(beta)^dagger, the state whose P function is
    an isotropic Gaussian of variance nbar/2 per quadrature centred on beta."""
    source = FockParams(params.dim + 60, params.tail_tol)
    probs = make_thermal_state(nbar, source).matrix.diagonal().real
    keep = probs > 1e-300
    levels = params.dim + 80
    d = displacement_matrix(beta, levels, source.dim)[:, keep]
    level_probs = np.einsum("mk,k,mk->m", d, probs[keep], d.conj()).real
    _gate(level_probs, params, f"displaced thermal beta={beta}, nbar={nbar}")
    d = d[: params.dim]
    rho = (d * probs[keep]) @ d.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


@dataclass(frozen=True)
class ModeOperators:
    dim: int
    a: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = np.diag(np.sqrt(np.arange(1, self.dim)), 1).astype(complex)
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def adag(self):
        return self.a.conj().T

    @property
    def n(self):
        return np.diag(np.arange(self.dim)).astype(complex)

    def quadrature(self, theta):
        return 0.5 * (self.a * np.exp(-1j * theta) + self.adag * np.exp(1j * theta))


def photon_number_distribution(rho):
    p = rho.matrix.diagonal().real.copy()
    p[(p < 0) & (p > -1e-12)] = 0.0
    return p


def photon_number_moments(rho):
    m = np.arange(rho.dim)
    p = rho.matrix.diagonal().real
    return float(np.dot(m, p)), float(np.dot(m * m, p))


def quadrature_moments(rho, theta):
    """<X_theta> and <X_theta^2> from normally ordered moments.

    a and a^2 act exactly on the retained basis, so no truncation artifact
    enters, even for states occupying the last level.
    """
    rho_m = rho.matrix
    ops = ModeOperators(rho.dim)
    a1 = np.trace(rho_m @ ops.a)
    a2 = np.trace(rho_m @ ops.a @ ops.a)
    nmean, _ = photon_number_moments(rho)
    e = np.exp(-1j * theta)
    mean = (e * a1).real
    second = 0.25 * (2.0 * (e * e * a2).real + 2.0 * nmean + 1.0)
    return float(mean), float(second)


def quadrature_half_width(rho, theta, extra_variance=0.0, sigmas=3.0):
    """Half-width holding the state's support (``sigmas`` standard deviations
    about the mean) plus six vacuum standard deviations (three units)."""
    mean, second = quadrature_moments(rho, theta)
    std = np.sqrt(max(second - mean**2 + extra_variance, 0.0))
    return abs(mean) + sigmas * std + 3.0


def default_quadrature_grid(rho=None, theta=0.0, step=DEFAULT_QUADRATURE_STEP, extra_variance=0.0):
    half = DEFAULT_QUADRATURE_HALF_WIDTH
    if rho is not None:
        # six standard deviations keep broad (antisqueezed, thermal) tails below 1e-8
        half = max(half, quadrature_half_width(rho, theta, extra_variance, sigmas=6.0))
    n = int(round(2 * half / step))
    if n % 2:
        n += 1
    return np.linspace(-half, half, n + 1)


def quadrature_distribution(rho, theta, grid=None):
    """Exact quadrature density p(x) = <x_theta|rho|x_theta> on a uniform grid.

    Raises DomainError when the grid does not reach three units beyond the
    state's support, and GridCoverageError when the trapezoid normalization
    misses by more than 1e-6.
    """
    if grid is None:
        grid = default_quadrature_grid(rho, theta)
    grid = np.asarray(grid, dtype=float)
    uniform_step(grid)
    mean, second = quadrature_moments(rho, theta)
    need = quadrature_half_width(rho, theta)
    std = np.sqrt(max(second - mean**2, 0.0))
    lo, hi = mean - 3.0 * std - 3.0, mean + 3.0 * std + 3.0
    if grid[0] > lo + 1e-12 or grid[-1] < hi - 1e-12:
        raise DomainError(
            f"quadrature grid [{grid[0]:g}, {grid[-1]:g}] does not cover [{lo:.3f}, {hi:.3f}] "
            f"(half-width {need:.3f} about the origin)"
        )
    psi = hermite_functions(grid, rho.dim) * np.exp(-1j * theta * np.arange(rho.dim))[:, None]
    p = np.einsum("mx,mn,nx->x", psi, rho.matrix, psi.conj()).real
    p = np.maximum(p, 0.0) if p.min() > -1e-12 else p
    total = float(trapezoid_weights(grid) @ p)
    if abs(total - 1.0) > 1e-6:
        raise GridCoverageError(f"quadrature density integrates to {total:.9f}", deficit=1.0 - total)
    return p


# --- two modes ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BeamSplitterParams:
    T: float
    R: float | None = None
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.T <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.T}")
        if self.R is None:
            object.__setattr__(self, "R", 1.0 - self.T)
        if self.R < 0 or abs(self.T + self.R - 1.0) > 1e-12:
            raise ValueError(f"T + R must equal 1, got T={self.T}, R={self.R}")


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Pure amplitudes (length dim**2) or density matrix (dim**2 x dim**2)
    over |m1> x |m2>, mode 1 as the slow index."""

    dim: int
    data: np.ndarray

    def __post_init__(self):
        data = _freeze(self.data)
        object.__setattr__(self, "data", data)
        d2 = self.dim**2
        if data.shape == (d2,):
            norm = np.vdot(data, data).real
            if abs(norm - 1.0) > TRACE_TOL:
                raise ValueError(f"two-mode state norm {norm!r} differs from 1")
        elif data.shape == (d2, d2):
            if np.max(np.abs(data - data.conj().T)) >= HERMITIAN_TOL:
                raise ValueError("two-mode density matrix is not Hermitian")
            if abs(np.trace(data) - 1.0) > TRACE_TOL:
                raise ValueError("two-mode density matrix trace differs from 1")
            if np.linalg.eigvalsh(data)[0] < -PSD_TOL:
                raise ValueError("two-mode density matrix is not positive semidefinite")
        else:
            raise ValueError(f"data shape {data.shape} incompatible with dim={self.dim}")

    @property
    def is_pure(self):
        return self.data.ndim == 1

    @classmethod
    def number_state(cls, m1, m2, dim):
        if max(m1, m2) >= dim:
            raise TruncationError(f"|{m1},{m2}> does not fit in dim={dim}", required_dim=max(m1, m2) + 1)
        psi = np.zeros((dim, dim), dtype=complex)
        psi[m1, m2] = 1.0
        return cls(dim, psi.ravel())

    @classmethod
    def product(cls, rho1, rho2):
        if rho1.dim != rho2.dim:
            raise ValueError("both modes must share the same truncation")
        return cls(rho1.dim, np.kron(rho1.matrix, rho2.matrix))

    def pure_components(self, cutoff=1e-15):
        """(weights, vectors) with vectors as columns over the tensor basis."""
        if self.is_pure:
            return np.ones(1), self.data[:, None]
        vals, vecs = np.linalg.eigh(self.data)
        keep = vals > cutoff
        return vals[keep], vecs[:, keep]

    def joint_photon_distribution(self):
        """P(m1, m2) as a dim x dim array."""
        if self.is_pure:
            p = np.abs(self.data) ** 2
        else:
            p = self.data.diagonal().real
        return p.reshape(self.dim, self.dim)

    def reduced(self, mode):
        """Reduced single-mode density matrix of mode 1 or 2."""
        d = self.dim
        if self.is_pure:
            psi = self.data.reshape(d, d)
            rho = psi @ psi.conj().T if mode == 1 else psi.T @ psi.conj()
        else:
            r = self.data.reshape(d, d, d, d)
            rho = np.einsum("ikjk->ij", r) if mode == 1 else np.einsum("kikj->ij", r)
        return DensityMatrix(0.5 * (rho + rho.conj().T))


def _beam_splitter_unitary(dim, bs):
    """Unitary on the tensor basis implementing a^dagger -> sqrt(T) a^dagger +
    i e^{i phase} sqrt(R) b^dagger, b^dagger -> i e^{-i phase} sqrt(R) a^dagger +
    sqrt(T) b^dagger.

    Assembled block by block in total photon number N from the Hermitian
    generator e^{-i phase} a^dagger b + h.c., so each block is unitary to
    rounding. Blocks with N >= dim are not closed under the truncation and
    are left out.
    """
    t = np.arccos(np.sqrt(bs.T))
    d = dim
    u = np.zeros((d * d, d * d), dtype=complex)
    for total in range(d):
        ks = np.arange(total + 1)
        idx = ks * d + (total - ks)
        h = np.zeros((total + 1, total + 1), dtype=complex)
        amp = np.sqrt((ks[:-1] + 1) * (total - ks[:-1]))
        h[ks[1:], ks[:-1]] = np.exp(-1j * bs.phase) * amp
        h[ks[:-1], ks[1:]] = np.exp(1j * bs.phase) * amp
        vals, vecs = np.linalg.eigh(h)
        block = (vecs * np.exp(1j * t * vals)) @ vecs.conj().T
        u[np.ix_(idx, idx)] = block
    return u


def apply_beam_splitter(state, bs):
    d = state.dim
    p = state.joint_photon_distribution()
    m1, m2 = np.indices((d, d))
    outside = p[m1 + m2 >= d].sum()
    if outside > 1e-12:
        need = int((m1 + m2)[p > 1e-12].max()) + 1
        raise TruncationError(
            f"input carries weight {outside:.3e} on total photon number >= dim={d}; "
            f"output would leave the truncation",
            required_dim=need,
        )
    u = _beam_splitter_unitary(d, bs)
    if state.is_pure:
        return TwoModeState(d, u @ state.data)
    out = u @ state.data @ u.conj().T
    return TwoModeState(d, 0.5 * (out + out.conj().T))


def total_number_distribution(state):
    p = state.joint_photon_distribution()
    d = state.dim
    m1, m2 = np.indices((d, d))
    return np.bincount((m1 + m2).ravel(), weights=p.ravel(), minlength=2 * d - 1)
