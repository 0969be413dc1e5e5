"""Inversion of joint measurements into inferred joint distributions.

Observed joint statistics p~(x, y) are mapped to the inferred distribution
p(x, y) = int dx' dy' mu_X(x, x') mu_Y(y, y') p~(x', y'), where the mu kernels
turn each observed marginal into the exact one. For classical models the
result is always a bona fide distribution; negativity is a witness of
nonclassical light read by a nonclassical measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import simpson_weights, trapezoid_weights, uniform_step
from .detectors import PHASE_NODES, ContinuousNumber, RotatedQuadrature
from .errors import DeconvolutionError, DomainError
from .quasiprob import (
    ClassicalEnsemble,
    CoherentPoint,
    GaussianComponent,
    PhaseSpaceField,
    husimi_q,
    q_from_classical_ensemble,
)

# vacuum kernel linking Wigner to Q, per real axis
VACUUM_VARIANCE = 0.25
DEFAULT_MAX_GAIN = 1e6
RESIDUAL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SignedJointDistribution:
    """Sampled joint density on ``x_grid`` x ``y_grid`` with quadrature weights.

    Values may be negative; the diagnostics report how far from a bona fide
    distribution they are.
    """

    x_grid: np.ndarray
    y_grid: np.ndarray
    values: np.ndarray
    x_weights: np.ndarray = None
    y_weights: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        y = np.asarray(self.y_grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (x.size, y.size):
            raise ValueError(f"values shape {values.shape} does not match grids {(x.size, y.size)}")
        wx = trapezoid_weights(x) if self.x_weights is None else np.asarray(self.x_weights, dtype=float)
        wy = trapezoid_weights(y) if self.y_weights is None else np.asarray(self.y_weights, dtype=float)
        for name, arr in (("x_grid", x), ("y_grid", y), ("values", values), ("x_weights", wx), ("y_weights", wy)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_field(cls, q):
        return cls(q.x, q.y, q.values)

    def integrate(self, values=None):
        values = self.values if values is None else values
        return float(self.x_weights @ values @ self.y_weights)

    @property
    def normalization(self):
        return self.integrate()

    @property
    def norm_defect(self):
        return self.normalization - 1.0

    @property
    def min_value(self):
        return float(self.values.min())

    @property
    def negativity_mass(self):
        """Integral of the negative part, reported as a nonnegative number."""
        return -self.integrate(np.minimum(self.values, 0.0))

    def marginal_x(self):
        return self.values @ self.y_weights

    def marginal_y(self):
        return self.x_weights @ self.values


# --- mu kernels --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseKernel:
    """mu(a, a') sampled on (out_grid, in_grid); applied as
    p(a) = sum_a' mu(a, a') w(a') p~(a') with the input quadrature weights."""

    out_grid: np.ndarray
    in_grid: np.ndarray
    matrix: np.ndarray
    in_weights: np.ndarray = None

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (len(self.out_grid), len(self.in_grid)):
            raise ValueError("kernel matrix shape does not match its grids")
        if self.in_weights is None:
            object.__setattr__(self, "in_weights", trapezoid_weights(self.in_grid))
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, grid, weights=None):
        """Delta kernel: identity divided by the cell weight."""
        grid = np.asarray(grid, dtype=float)
        weights = trapezoid_weights(grid) if weights is None else np.asarray(weights, dtype=float)
        return cls(grid, grid, np.diag(1.0 / weights), weights)

    def apply(self, values, grid, axis=0):
        grid = np.asarray(grid, dtype=float)
        if grid.shape != np.shape(self.in_grid) or not np.allclose(grid, self.in_grid, rtol=0, atol=1e-12):
            raise ValueError("distribution grid does not match the kernel input grid")
        op = self.matrix * self.in_weights[None, :]
        out = np.moveaxis(np.tensordot(op, np.moveaxis(values, axis, 0), axes=1), 0, axis)
        return out, np.asarray(self.out_grid, dtype=float)


@dataclass(frozen=True)
class GaussianDeconvolution:
    """Inverse of the readout blur K = (1 - weight) delta + weight N(0, variance).

    Applied as spectral division on a uniform grid. Where the divisor falls
    below 1 / max_gain the spectrum is set to zero (a sharp cutoff); with
    weight < 1 - 1/max_gain no cutoff is ever reached and the inverse is exact
    up to rounding.
    """

    variance: float
    weight: float = 1.0
    max_gain: float = DEFAULT_MAX_GAIN

    def __post_init__(self):
        if self.variance <= 0 or not 0 < self.weight <= 1 or self.max_gain <= 1:
            raise ValueError(f"invalid deconvolution parameters {self}")

    def transfer(self, k):
        """Fourier transform of the blur kernel at frequency ``k`` (cycles per unit)."""
        return 1.0 - self.weight + self.weight * np.exp(-2.0 * np.pi**2 * self.variance * np.asarray(k) ** 2)

    def blur_density(self, offset):
        """Continuous part of the blur kernel, N(offset; 0, variance)."""
        return np.exp(-np.asarray(offset) ** 2 / (2 * self.variance)) / math.sqrt(2 * math.pi * self.variance)

    def apply(self, values, grid, axis=0):
        grid = np.asarray(grid, dtype=float)
        h = uniform_step(grid)
        k = np.fft.fftfreq(grid.size, h)
        t = self.transfer(k)
        gain = np.where(t * self.max_gain > 1.0, 1.0 / t, 0.0)
        shape = [1] * np.ndim(values)
        shape[axis] = grid.size
        spec = np.fft.fft(values, axis=axis) * gain.reshape(shape)
        return np.fft.ifft(spec, axis=axis).real, grid


MuKernel = DenseKernel | GaussianDeconvolution


def apply_inversion(observed, mu_x, mu_y):
    """Tensor-product application of mu_X along x and mu_Y along y."""
    values, x_out = mu_x.apply(observed.values, observed.x_grid, axis=0)
    values, y_out = mu_y.apply(values, observed.y_grid, axis=1)
    wx = observed.x_weights if x_out is observed.x_grid or np.array_equal(x_out, observed.x_grid) else None
    wy = observed.y_weights if y_out is observed.y_grid or np.array_equal(y_out, observed.y_grid) else None
    return SignedJointDistribution(x_out, y_out, values, wx, wy)


def invert_marginal(kernel, values, grid):
    out, _ = kernel.apply(np.asarray(values, dtype=float), grid, axis=0)
    return out


# --- classical joint models --------------------------------------------------


@dataclass(frozen=True)
class ClassicalJointModel:
    """Hidden-variable model: a classical ensemble read by two classical
    detectors whose responses factorize at every phase-space point.

    The hidden-variable density is the ensemble's Q function, so
    p(x, y) = int d^2 alpha p_X(x|alpha) p_Y(y|alpha) Q(alpha), conditionals
    normalized to one (equivalently pi times the integral with conditionals
    normalized to 1/pi).
    """

    ensemble: ClassicalEnsemble
    detector_x: ContinuousNumber | RotatedQuadrature
    detector_y: ContinuousNumber | RotatedQuadrature

    def __post_init__(self):
        for det in (self.detector_x, self.detector_y):
            if not getattr(det, "classical", False):
                raise ValueError(f"{det!r} is not a classical detector")
            if det.blur < 0:
                raise ValueError("detector blur must be nonnegative")


def _gauss(x, mean, var):
    return np.exp(-((x - mean) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)


def _quadrature_pair(ens, dx, dy, x, y):
    weights, means, var = ens.q_gaussians()
    c = math.cos(dx.theta - dy.theta)
    out = np.zeros((x.size, y.size))
    X, Y = np.meshgrid(x, y, indexing="ij")
    for w, m, v in zip(weights, means, var):
        sxx = v + dx.blur
        syy = v + dy.blur
        sxy = v * c
        det = sxx * syy - sxy**2
        if det <= 1e-14 * sxx * syy:
            raise ValueError("parallel sharp quadrature detectors give a joint density on a line")
        ux = (m * np.exp(-1j * dx.theta)).real
        uy = (m * np.exp(-1j * dy.theta)).real
        a, b = X - ux, Y - uy
        quad = (syy * a * a - 2 * sxy * a * b + sxx * b * b) / det
        out += w * np.exp(-0.5 * quad) / (2 * np.pi * math.sqrt(det))
    return out


def _number_phase_nodes(n_max, blur):
    nodes = PHASE_NODES
    while nodes < 8 * np.pi * math.sqrt(max(n_max, 1.0) / blur):
        nodes *= 2
    return nodes


def _number_quadrature_pair(ens, dq, n, x):
    """p(n, x) for a sharp number detector and a blurred quadrature detector:
    (1/2) int dphi Q(sqrt(n) e^{i phi}) N(x; sqrt(n) cos(phi - theta), blur)."""
    nodes = _number_phase_nodes(n.max(), dq.blur)
    phi = 2 * np.pi * np.arange(nodes) / nodes
    out = np.empty((n.size, x.size))
    for i, ni in enumerate(n):
        r = math.sqrt(ni)
        q = q_from_classical_ensemble(ens, r * np.exp(1j * phi))
        proj = r * np.cos(phi - dq.theta)
        out[i] = np.pi * (q[None, :] * _gauss(x[:, None], proj[None, :], dq.blur)).mean(axis=1)
    return out


def _number_density(ens, n, nodes=PHASE_NODES):
    phi = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return np.pi * q_from_classical_ensemble(ens, np.sqrt(n)[:, None] * phi[None, :]).mean(axis=1)


def _number_pair(ens, d1, d2, n1, n2):
    if d1.blur == 0 and d2.blur == 0:
        raise ValueError("two sharp number detectors give a joint density on the diagonal")
    if d1.blur == 0:
        return _number_density(ens, n1)[:, None] * _gauss(n2[None, :], n1[:, None], d2.blur)
    if d2.blur == 0:
        return (_number_density(ens, n2)[:, None] * _gauss(n1[None, :], n2[:, None], d1.blur)).T
    top = max(n1.max(), n2.max()) + 10 * math.sqrt(max(d1.blur, d2.blur))
    s = np.linspace(0, top, 2 * int(top / 0.005) + 1)
    p = _number_density(ens, s) * simpson_weights(s)
    return (_gauss(n1[:, None], s[None, :], d1.blur) * p) @ _gauss(n2[None, :], s[:, None], d2.blur)


def classical_joint_statistics(model, x_grid, y_grid):
    """Joint density of a ClassicalJointModel on the given grids.

    Supported detector pairs: two quadratures (closed form, singular only when
    parallel and both sharp); a sharp number detector with a blurred
    quadrature detector (phase integral); two number detectors with at least
    one blurred. Configurations whose joint density is a line singularity
    raise ValueError.
    """
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    ens, dx, dy = model.ensemble, model.detector_x, model.detector_y
    if isinstance(dx, RotatedQuadrature) and isinstance(dy, RotatedQuadrature):
        values = _quadrature_pair(ens, dx, dy, x, y)
    elif isinstance(dx, ContinuousNumber) and isinstance(dy, RotatedQuadrature):
        if dx.blur or not dy.blur:
            raise ValueError("number x quadrature needs a sharp number and a blurred quadrature detector")
        values = _number_quadrature_pair(ens, dy, x, y)
    elif isinstance(dx, RotatedQuadrature) and isinstance(dy, ContinuousNumber):
        if dy.blur or not dx.blur:
            raise ValueError("number x quadrature needs a sharp number and a blurred quadrature detector")
        values = _number_quadrature_pair(ens, dx, y, x).T
    else:
        values = _number_pair(ens, dx, dy, x, y)
    # sharp number axes start at n = 0 where the density has a nonzero slope;
    # Simpson keeps their quadrature error at the level of the number detectors
    wx = simpson_weights(x) if isinstance(dx, ContinuousNumber) and not dx.blur else None
    wy = simpson_weights(y) if isinstance(dy, ContinuousNumber) and not dy.blur else None
    return SignedJointDistribution(x, y, values, wx, wy)


# --- diagnostics -------------------------------------------------------------


@dataclass(frozen=True)
class BonaFideVerdict:
    passed: bool
    min_value: float
    norm_defect: float
    negativity_mass: float
    issues: tuple = ()


def bona_fide_check(dist, tol=1e-8, norm_tol=1e-4):
    """Flag values below -tol and normalization defects beyond norm_tol."""
    issues = []
    if not np.all(np.isfinite(dist.values)):
        issues.append("non-finite values")
    if dist.min_value < -tol:
        issues.append(f"negative values down to {dist.min_value:.3e}")
    if abs(dist.norm_defect) > norm_tol:
        issues.append(f"normalization off by {dist.norm_defect:.3e}")
    return BonaFideVerdict(not issues, dist.min_value, dist.norm_defect, dist.negativity_mass, tuple(issues))


# --- heterodyne to Wigner ----------------------------------------------------


def vacuum_cutoff(max_gain=DEFAULT_MAX_GAIN):
    """Spatial frequency where the vacuum Gaussian transfer e^{-pi^2 k^2 / 2}
    drops to 1 / max_gain."""
    return math.sqrt(2.0 * math.log(max_gain)) / math.pi


def heterodyne_to_wigner(q, max_gain=DEFAULT_MAX_GAIN):
    """Deconvolve a sampled Q function into the Wigner function.

    Q is W smoothed by the vacuum Gaussian of variance 1/4 per axis, so the
    inverse divides the 2-D spectrum by e^{-pi^2 |k|^2 / 2} inside a circular
    cutoff where that divisor stays above 1/max_gain, and zeroes the rest.
    Raises DeconvolutionError when Q carries spectral weight above 1e-6 of
    its total at or beyond the cutoff (noise or under-resolved data: a
    physical Q never does), and DomainError when the grid cannot represent
    frequencies up to the cutoff.
    """
    hx, hy = uniform_step(q.x), uniform_step(q.y)
    kc = vacuum_cutoff(max_gain)
    nyquist = 0.5 / max(hx, hy)
    if nyquist < kc:
        raise DomainError(f"grid step {max(hx, hy):g} resolves frequencies up to {nyquist:.3f} < cutoff {kc:.3f}")
    kx = np.fft.fftfreq(q.nx, hx)
    ky = np.fft.fftfreq(q.ny, hy)
    k2 = kx[:, None] ** 2 + ky[None, :] ** 2
    spec = np.fft.fft2(q.values)
    inside = k2 < kc**2
    residual = float(np.max(np.abs(spec[~inside]), initial=0.0) / abs(spec[0, 0]))
    if residual > RESIDUAL_TOL:
        raise DeconvolutionError(f"Q spectrum beyond the cutoff is {residual:.2e} of its total; data too noisy or coarse")
    gain = np.zeros_like(k2)
    gain[inside] = np.exp(0.5 * np.pi**2 * k2[inside])
    w = np.fft.ifft2(spec * gain).real
    return SignedJointDistribution(q.x, q.y, w, meta={"cutoff": kc, "max_gain": max_gain, "residual": residual})


# --- randomized separability suite -------------------------------------------


@dataclass(frozen=True)
class SuiteTrial:
    index: int
    passed: bool
    min_value: float
    norm_defect: float
    max_error: float
    model: str


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    trials: tuple
    quantum_control: BonaFideVerdict

    @property
    def passes(self):
        return sum(t.passed for t in self.trials)

    @property
    def failures(self):
        return [t for t in self.trials if not t.passed]

    @property
    def worst_min(self):
        return min(t.min_value for t in self.trials)

    @property
    def worst_norm_defect(self):
        return max(abs(t.norm_defect) for t in self.trials)


def random_ensemble(rng, max_components=5, max_abs_beta=2.0, max_variance=1.0):
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    weights[-1] = 1.0 - weights[:-1].sum()
    comps = []
    for _ in range(k):
        beta = max_abs_beta * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if rng.uniform() < 0.5:
            comps.append(CoherentPoint(complex(beta)))
        else:
            comps.append(GaussianComponent(complex(beta), float(rng.uniform(0.05, max_variance))))
    return ClassicalEnsemble(tuple(weights), tuple(comps))


def _support_grid(ens, dx, dy, blur_x, blur_y, step):
    _, means, var = ens.q_gaussians()
    vmax = var.max()
    axes = []
    for det, blur in ((dx, blur_x), (dy, blur_y)):
        proj = (means * np.exp(-1j * det.theta)).real
        pad = 9.0 * math.sqrt(vmax + det.blur + blur)
        lo, hi = proj.min() - pad, proj.max() + pad
        n = int(math.ceil((hi - lo) / step))
        axes.append(lo + step * np.arange(n + 1))
    return axes


def blurred_model(model, axis, extra):
    """Same model with readout blur ``extra`` added to one detector."""
    det = model.detector_x if axis == 0 else model.detector_y
    det = RotatedQuadrature(det.theta, det.blur + extra)
    if axis == 0:
        return ClassicalJointModel(model.ensemble, det, model.detector_y)
    return ClassicalJointModel(model.ensemble, model.detector_x, det)


def observed_statistics(model, blur_x, blur_y, x, y):
    """Forward model: each quadrature reading passes through the readout
    (1 - weight) delta + weight N(0, variance); ``blur_*`` are GaussianDeconvolution
    descriptors or None for a perfect readout."""
    terms = [(1.0, model)]
    for axis, blur in ((0, blur_x), (1, blur_y)):
        if blur is None:
            continue
        terms = [
            pair
            for w, m in terms
            for pair in ((w * (1 - blur.weight), m), (w * blur.weight, blurred_model(m, axis, blur.variance)))
            if pair[0] > 0
        ]
    values = sum(w * classical_joint_statistics(m, x, y).values for w, m in terms)
    return SignedJointDistribution(x, y, values)


def separability_trial(model, blur_x, blur_y, step=0.1):
    """Observed -> inverted -> compared with the sharp-detector joint.

    Returns (inferred distribution, exact distribution).
    """
    x, y = _support_grid(
        model.ensemble,
        model.detector_x,
        model.detector_y,
        0.0 if blur_x is None else blur_x.variance,
        0.0 if blur_y is None else blur_y.variance,
        step,
    )
    observed = observed_statistics(model, blur_x, blur_y, x, y)
    mu_x = DenseKernel.identity(x) if blur_x is None else blur_x
    mu_y = DenseKernel.identity(y) if blur_y is None else blur_y
    inferred = apply_inversion(observed, mu_x, mu_y)
    exact = classical_joint_statistics(model, x, y)
    return inferred, exact


def random_trial_setup(rng):
    ens = random_ensemble(rng)
    theta_x = float(rng.uniform(0, np.pi))
    theta_y = theta_x + float(rng.uniform(np.pi / 4, 3 * np.pi / 4))
    model = ClassicalJointModel(ens, RotatedQuadrature(theta_x), RotatedQuadrature(theta_y))
    blurs = []
    for _ in range(2):
        if rng.uniform() < 0.25:
            blurs.append(None)
        else:
            blurs.append(GaussianDeconvolution(float(rng.uniform(0.05, 0.5)), float(rng.uniform(0.1, 0.5))))
    return model, blurs[0], blurs[1]


def quantum_control(rho, half_width=6.0, step=0.05):
    """Feed the heterodyne statistics (Q) of a quantum state through the same
    inversion with vacuum-variance Gaussian kernels on both axes."""
    x = np.arange(-half_width, half_width + step / 2, step)
    q = husimi_q(rho, x[:, None] + 1j * x[None, :])
    observed = SignedJointDistribution(x, x, q)
    kernel = GaussianDeconvolution(VACUUM_VARIANCE)
    return bona_fide_check(apply_inversion(observed, kernel, kernel))


def separability_property_suite(seed, trials, min_tol=1e-8, norm_tol=1e-4, control_state=None):
    """Randomized check that inverting any separable classical model yields a
    bona fide joint distribution. Each trial is reproducible from
    (seed, index); failing trials keep the model repr for replay.
    """
    results = []
    for index in range(trials):
        rng = np.random.default_rng([seed, index])
        model, bx, by = random_trial_setup(rng)
        inferred, exact = separability_trial(model, bx, by)
        verdict = bona_fide_check(inferred, min_tol, norm_tol)
        results.append(
            SuiteTrial(
                index,
                verdict.passed,
                verdict.min_value,
                verdict.norm_defect,
                float(np.max(np.abs(inferred.values - exact.values))),
                "" if verdict.passed else repr((model, bx, by)),
            )
        )
    if control_state is None:
        from .fock import FockParams, make_number_state

        control_state = make_number_state(1, FockParams(4))
    return SuiteReport(seed, tuple(results), quantum_control(control_state))
