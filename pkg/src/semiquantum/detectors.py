"""Classical-like detectors acting on quantum light.

A classical detector answers with a bona fide conditional density p(a|alpha)
over phase space, so its statistics are Q-averages of that density. Two
kinds are modelled:

* ``ContinuousNumber``: outcome n = |alpha|^2, a continuous photon number.
* ``RotatedQuadrature``: outcome x = Re(alpha e^{-i theta}).

Each may carry an additive Gaussian readout blur of given variance (zero
means the sharp, delta-function response). Single-detector statistics are
computed twice, by integrating Q over phase space and by closed-form kernels
applied to the exact quantum distributions, and the two are cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, gammaln, xlogy

from ._numerics import simpson_weights, trapezoid_weights
from .errors import GridCoverageError, ToleranceError
from .fock import (
    DensityMatrix,
    default_quadrature_grid,
    photon_number_distribution,
    photon_number_moments,
    quadrature_distribution,
    quadrature_half_width,
    quadrature_moments,
)
from .quasiprob import husimi_q, two_mode_husimi_q_outer

PHASE_NODES = 256
NUMBER_STEP = 0.01
JOINT_NUMBER_STEP = 0.05
QUADRATURE_Y_STEP = 0.05
NUMBER_NORM_TOL = 1e-5
MOMENT_ROUTE_TOL = 1e-5
QUADRATURE_NORM_TOL = 1e-6
VERDICT_TOL = 1e-9


@dataclass(frozen=True)
class ContinuousNumber:
    blur: float = 0.0
    classical = True


@dataclass(frozen=True)
class RotatedQuadrature:
    theta: float = 0.0
    blur: float = 0.0
    classical = True


@dataclass(frozen=True)
class QuantumNumber:
    classical = False


@dataclass(frozen=True)
class QuantumQuadrature:
    theta: float = 0.0
    classical = False


DetectorModel = ContinuousNumber | RotatedQuadrature | QuantumNumber | QuantumQuadrature


@dataclass(frozen=True, eq=False)
class SemiquantumNumberStats:
    n_grid: np.ndarray
    density: np.ndarray
    mean: float
    second_moment: float
    closed_mean: float | None = None
    closed_second_moment: float | None = None

    @property
    def variance(self):
        return self.second_moment - self.mean**2

    @property
    def closed_variance(self):
        if self.closed_mean is None:
            return None
        return self.closed_second_moment - self.closed_mean**2


@dataclass(frozen=True, eq=False)
class SemiquantumQuadratureStats:
    x_grid: np.ndarray
    density: np.ndarray
    mean: float
    second_moment: float
    smoothed: np.ndarray = field(repr=False, default=None)
    route_discrepancy: float = 0.0

    @property
    def variance(self):
        return self.second_moment - self.mean**2


def default_number_grid(p_m, step=NUMBER_STEP, tail=1e-10):
    """Uniform grid on [0, max_n] with an odd point count for Simpson.

    max_n starts at <n> + 10 sqrt(var + <n>) + 10 and grows until the
    photocount mass beyond it, sum p_m Gamma(m + 1, max_n) / m!, is below
    ``tail``.
    """
    p_m = np.asarray(p_m, dtype=float)
    m = np.arange(p_m.size)
    mean = m @ p_m
    var = (m * m) @ p_m - mean**2
    top = mean + 10.0 * np.sqrt(max(var, 0.0) + mean) + 10.0
    while p_m @ gammaincc(m + 1.0, top) > tail:
        top += 1.0
    n = int(np.ceil(top / step))
    n += n % 2
    return np.linspace(0.0, n * step, n + 1)


def _number_moments(n_grid, density):
    w = simpson_weights(n_grid)
    return float(w @ density), float(w @ (n_grid * density)), float(w @ (n_grid**2 * density))


def _check_norm(total, tol, what):
    if abs(total - 1.0) > tol:
        raise GridCoverageError(f"{what} integrates to {total:.9f}; grid misses mass", deficit=1.0 - total)


def semiquantum_number_via_q(rho, n_grid=None, phase_nodes=PHASE_NODES):
    """p_N(n) = (1/2) int dphi Q(sqrt(n) e^{i phi}), periodic trapezoid in phi."""
    if n_grid is None:
        n_grid = default_number_grid(photon_number_distribution(rho))
    n_grid = np.asarray(n_grid, dtype=float)
    phi = 2.0 * np.pi * np.arange(phase_nodes) / phase_nodes
    alpha = np.sqrt(n_grid)[:, None] * np.exp(1j * phi)[None, :]
    density = np.pi * husimi_q(rho, alpha).mean(axis=1)
    total, mean, second = _number_moments(n_grid, density)
    _check_norm(total, NUMBER_NORM_TOL, "photocount density (Q route)")
    return SemiquantumNumberStats(n_grid, density, mean, second)


def poisson_kernel(m, n):
    """n^m e^{-n} / m!, shape ``(len(m), len(n))``, evaluated in log space."""
    m = np.asarray(m, dtype=float)[:, None]
    n = np.asarray(n, dtype=float)[None, :]
    return np.exp(xlogy(m, n) - n - gammaln(m + 1.0))


def semiquantum_number_via_kernel(p_m, n_grid=None):
    """p_N(n) = sum_m p_m n^m e^{-n} / m!.

    Moments come both from the grid and in closed form, <n> = sum (m+1) p_m
    and <n^2> = sum (m^2 + 3m + 2) p_m; a disagreement beyond 1e-5 (relative
    to the moment when it exceeds one) raises ToleranceError.
    """
    p_m = np.asarray(p_m, dtype=float)
    if abs(p_m.sum() - 1.0) > 1e-10:
        raise ValueError(f"photon-number distribution sums to {p_m.sum()!r}")
    if n_grid is None:
        n_grid = default_number_grid(p_m)
    n_grid = np.asarray(n_grid, dtype=float)
    m = np.arange(p_m.size)
    density = p_m @ poisson_kernel(m, n_grid)
    total, mean, second = _number_moments(n_grid, density)
    _check_norm(total, 1e-6, "photocount density (kernel route)")
    closed_mean = float((m + 1.0) @ p_m)
    closed_second = float((m * m + 3.0 * m + 2.0) @ p_m)
    for grid_value, closed, name in ((mean, closed_mean, "<n>"), (second, closed_second, "<n^2>")):
        if abs(grid_value - closed) > MOMENT_ROUTE_TOL * max(1.0, abs(closed)):
            raise ToleranceError(f"{name}: grid {grid_value!r} vs closed form {closed!r}")
    return SemiquantumNumberStats(n_grid, density, mean, second, closed_mean, closed_second)


def default_joint_phase_nodes(dim):
    """Smallest power of two above 2 (dim - 1), at least 16; the two-mode Q
    is a trigonometric polynomial of degree below 2 dim in each phase."""
    nodes = 16
    while nodes <= 2 * (dim - 1):
        nodes *= 2
    return nodes


@dataclass(frozen=True, eq=False)
class JointNumberStats:
    n1_grid: np.ndarray
    n2_grid: np.ndarray
    density: np.ndarray
    correlation: float
    normalization: float

    def as_distribution(self):
        from .inversion import SignedJointDistribution

        return SignedJointDistribution(
            self.n1_grid, self.n2_grid, self.density, simpson_weights(self.n1_grid), simpson_weights(self.n2_grid)
        )


def semiquantum_joint_number(state, n_grid=None, phase_nodes=None):
    """Joint photocount density of two continuous-number detectors,
    p(n1, n2) = (1/4) int dphi1 dphi2 Q(sqrt(n1) e^{i phi1}, sqrt(n2) e^{i phi2}),
    and <n1 n2> by two-dimensional Simpson integration.

    ``n_grid`` may be one grid shared by both modes or a pair of grids.
    """
    if phase_nodes is None:
        phase_nodes = default_joint_phase_nodes(state.dim)
    if n_grid is None:
        p = state.joint_photon_distribution()
        g1 = default_number_grid(p.sum(axis=1), JOINT_NUMBER_STEP)
        g2 = default_number_grid(p.sum(axis=0), JOINT_NUMBER_STEP)
        top = max(g1[-1], g2[-1])
        n1_grid = n2_grid = g1 if g1[-1] == top else g2
    elif isinstance(n_grid, tuple):
        n1_grid, n2_grid = (np.asarray(g, dtype=float) for g in n_grid)
    else:
        n1_grid = n2_grid = np.asarray(n_grid, dtype=float)
    phi = np.exp(2j * np.pi * np.arange(phase_nodes) / phase_nodes)
    a1 = (np.sqrt(n1_grid)[:, None] * phi[None, :]).ravel()
    a2 = (np.sqrt(n2_grid)[:, None] * phi[None, :]).ravel()
    q = two_mode_husimi_q_outer(state, a1, a2)
    q = q.reshape(n1_grid.size, phase_nodes, n2_grid.size, phase_nodes)
    density = np.pi**2 * q.mean(axis=(1, 3))
    w1, w2 = simpson_weights(n1_grid), simpson_weights(n2_grid)
    total = float(w1 @ density @ w2)
    _check_norm(total, NUMBER_NORM_TOL, "joint photocount density")
    corr = float((w1 * n1_grid) @ density @ (w2 * n2_grid))
    return JointNumberStats(n1_grid, n2_grid, density, corr, total)


def joint_number_via_kernel(state, n1_grid, n2_grid):
    """Closed-form joint density sum P(m1, m2) Pois(n1; m1) Pois(n2; m2)."""
    p = state.joint_photon_distribution()
    m = np.arange(state.dim)
    return poisson_kernel(m, n1_grid).T @ p @ poisson_kernel(m, n2_grid)


def quantum_joint_number_correlation(state):
    p = state.joint_photon_distribution()
    m = np.arange(state.dim)
    return float(m @ p @ m)


def semiquantum_quadrature(rho, theta, x_grid=None, y_step=QUADRATURE_Y_STEP):
    """Statistics of a sharp classical quadrature detector at angle ``theta``.

    The density is the marginal of Q along the rotated axis,
    p_X(x) = int dy Q((x + i y) e^{i theta}); it is also rebuilt by smoothing
    the exact quadrature density with the vacuum Gaussian of variance 1/4, and
    the largest pointwise gap between the two is reported.
    """
    if x_grid is None:
        x_grid = default_quadrature_grid(rho, theta, extra_variance=0.25)
    x_grid = np.asarray(x_grid, dtype=float)
    perp_mean, _ = quadrature_moments(rho, theta + np.pi / 2)
    half = quadrature_half_width(rho, theta + np.pi / 2, extra_variance=0.25, sigmas=6.0)
    half = max(half - abs(perp_mean), 3.0)
    ny = int(np.ceil(2 * half / y_step))
    y = perp_mean + np.linspace(-half, half, ny + 1)
    alpha = (x_grid[:, None] + 1j * y[None, :]) * np.exp(1j * theta)
    density = husimi_q(rho, alpha) @ trapezoid_weights(y)

    exact = quadrature_distribution(rho, theta, x_grid)
    diff = x_grid[:, None] - x_grid[None, :]
    smoothing = np.sqrt(2.0 / np.pi) * np.exp(-2.0 * diff**2) * trapezoid_weights(x_grid)[None, :]
    smoothed = smoothing @ exact

    w = trapezoid_weights(x_grid)
    total = float(w @ density)
    _check_norm(total, QUADRATURE_NORM_TOL, "quadrature detector density")
    return SemiquantumQuadratureStats(
        x_grid,
        density,
        float(w @ (x_grid * density)),
        float(w @ (x_grid**2 * density)),
        smoothed,
        float(np.max(np.abs(smoothed - density))),
    )


@dataclass(frozen=True)
class ClassicalityVerdict:
    """One nonclassicality test read by a quantum and a classical detector.

    ``quantity`` is ``number`` (variance minus mean, bound 0 from below),
    ``quadrature`` (variance, bound 1/4 from below) or ``cross-correlation``
    (<n1 n2>, violated when coincidences vanish although both outputs are lit).
    """

    quantity: str
    quantum_value: float
    semiquantum_value: float
    bound: float
    quantum_violates_bound: bool
    semiquantum_violates_bound: bool
    detail: dict = field(default_factory=dict, compare=False)


def _number_verdict(rho):
    mean, second = photon_number_moments(rho)
    stats = semiquantum_number_via_kernel(photon_number_distribution(rho))
    q_val = second - mean**2 - mean
    # closed-form moments are exact; the grid moments carry ~1e-8 quadrature error
    s_val = stats.closed_variance - stats.closed_mean
    return ClassicalityVerdict(
        "number",
        q_val,
        s_val,
        0.0,
        q_val < -VERDICT_TOL,
        s_val < -VERDICT_TOL,
        {"quantum_mean": mean, "quantum_variance": second - mean**2,
         "semiquantum_mean": stats.closed_mean, "semiquantum_variance": stats.closed_variance},
    )


def _quadrature_verdict(rho, theta):
    mean, second = quadrature_moments(rho, theta)
    stats = semiquantum_quadrature(rho, theta)
    q_val = second - mean**2
    return ClassicalityVerdict(
        "quadrature",
        q_val,
        stats.variance,
        0.25,
        q_val < 0.25 - VERDICT_TOL,
        stats.variance < 0.25 - VERDICT_TOL,
        {"theta": float(theta)},
    )


def _cross_verdict(state):
    p = state.joint_photon_distribution()
    m = np.arange(state.dim)
    lit = (m @ p.sum(axis=1)) > VERDICT_TOL and (m @ p.sum(axis=0)) > VERDICT_TOL
    quantum = quantum_joint_number_correlation(state)
    semi = semiquantum_joint_number(state).correlation
    return ClassicalityVerdict(
        "cross-correlation",
        quantum,
        semi,
        0.0,
        bool(lit and quantum <= VERDICT_TOL),
        bool(lit and semi <= VERDICT_TOL),
    )


def classicality_verdicts(state, thetas=(0.0, np.pi / 2)):
    """Verdicts for a single-mode DensityMatrix (number and quadratures at
    ``thetas``) or a TwoModeState (cross-correlation plus per-mode number)."""
    if isinstance(state, DensityMatrix):
        verdicts = [_number_verdict(state)] + [_quadrature_verdict(state, t) for t in thetas]
    else:
        verdicts = [_cross_verdict(state)] + [_number_verdict(state.reduced(k)) for k in (1, 2)]
    broken = [v for v in verdicts if v.semiquantum_violates_bound]
    if broken:
        raise ToleranceError(f"classical detector reports a nonclassical signature: {broken}")
    return verdicts
