"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are collected into an
"acceptance criteria" section of the pytest terminal summary.
"""

import math

import numpy as np
import pytest
from scipy.special import eval_hermite, factorial

from conftest import CORPUS, record_acceptance
from semiquantum._numerics import trapezoid_weights
from semiquantum.detectors import (
    classicality_verdicts,
    quantum_joint_number_correlation,
    semiquantum_joint_number,
    semiquantum_number_via_kernel,
    semiquantum_number_via_q,
    semiquantum_quadrature,
)
from semiquantum.fock import (
    BeamSplitterParams,
    DensityMatrix,
    FockParams,
    ModeOperators,
    TwoModeState,
    apply_beam_splitter,
    make_coherent_state,
    make_number_state,
    make_squeezed_vacuum,
    photon_number_distribution,
    photon_number_moments,
    quadrature_moments,
)
from semiquantum.inversion import heterodyne_to_wigner, separability_property_suite
from semiquantum.quasiprob import GridSpec, husimi_q_grid, wigner_oracle


def verdict(number, ok, detail):
    record_acceptance(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def number_stats(corpus):
    out = {}
    for label, rho in corpus.items():
        via_q = semiquantum_number_via_q(rho)
        via_k = semiquantum_number_via_kernel(photon_number_distribution(rho), via_q.n_grid)
        out[label] = (rho, via_q, via_k)
    return out


def test_criterion_1_mean_shift(number_stats):
    grid_err = closed_err = 0.0
    for label, (rho, via_q, via_k) in number_stats.items():
        mean, _ = photon_number_moments(rho)
        # the quantum mean also matches the state's closed-form mean
        assert abs(mean - CORPUS[label][1]) < 1e-8
        grid_err = max(grid_err, abs(via_q.mean - mean - 1))
        closed_err = max(closed_err, abs(via_k.closed_mean - mean - 1))
    verdict(1, grid_err < 1e-5 and closed_err < 1e-10,
            f"max |<n> - <n^> - 1|: grid {grid_err:.2e} (tol 1e-5), closed form {closed_err:.2e} (tol 1e-10)")


def random_mixed_state(rng, dim, near_number=False):
    if near_number:
        # a number state with a small random admixture sits close to the Poisson boundary
        eps = 10 ** rng.uniform(-3, -1)
        pure = np.zeros((dim, dim))
        m = int(rng.integers(0, dim))
        pure[m, m] = 1
        return DensityMatrix((1 - eps) * pure + eps * random_mixed_state(rng, dim).matrix)
    rank = int(rng.integers(2, dim + 1))
    vecs = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = vecs @ np.diag(rng.dirichlet(np.ones(rank))) @ vecs.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def test_criterion_2_superpoissonian(number_stats):
    identity_err = 0.0
    for label, (rho, via_q, _) in number_stats.items():
        mean, second = photon_number_moments(rho)
        identity_err = max(identity_err, abs(via_q.variance - (second - mean**2) - via_q.mean))
    rng = np.random.default_rng(20240601)
    worst_grid = worst_closed = math.inf
    for i in range(200):
        rho = random_mixed_state(rng, int(rng.integers(2, 9)), near_number=i % 2 == 1)
        stats = semiquantum_number_via_kernel(photon_number_distribution(rho))
        worst_grid = min(worst_grid, stats.variance - stats.mean)
        worst_closed = min(worst_closed, stats.closed_variance - stats.closed_mean)
    ok = identity_err < 1e-5 and worst_grid >= -1e-9 and worst_closed >= -1e-9
    verdict(2, ok, f"max |Var n - Var n^ - <n>| {identity_err:.2e} (tol 1e-5); 200 random mixed states "
                   f"min(Var n - <n>) grid {worst_grid:.3e}, closed form {worst_closed:.3e} (>= -1e-9)")


def _single_photon(T, phase=0.0):
    return apply_beam_splitter(TwoModeState.number_state(1, 0, 3), BeamSplitterParams(T, phase=phase))


def test_criterion_3_anticorrelation():
    quantum = semi_err = swap_err = 0.0
    for T in (0.3, 0.5, 0.7):
        out = _single_photon(T)
        quantum = max(quantum, abs(quantum_joint_number_correlation(out)))
        corr = semiquantum_joint_number(out).correlation
        semi_err = max(semi_err, abs(corr - 2))
        swap_err = max(swap_err, abs(corr - semiquantum_joint_number(_single_photon(1 - T)).correlation))
    ok = quantum < 1e-12 and semi_err < 1e-3 and swap_err < 1e-6
    verdict(3, ok, f"quantum |<n1n2>| {quantum:.1e} (tol 1e-12); semiquantum |<n1n2> - 2| {semi_err:.2e} "
                   f"(tol 1e-3); T<->R change {swap_err:.1e} (tol 1e-6)")


def test_criterion_4_hom():
    out = apply_beam_splitter(TwoModeState.number_state(1, 1, 3), BeamSplitterParams(0.5))
    quantum = abs(quantum_joint_number_correlation(out))
    stats = semiquantum_joint_number(out)
    n1, n2 = np.meshgrid(stats.n1_grid, stats.n2_grid, indexing="ij")
    density_err = float(np.max(np.abs(stats.density - 0.25 * (n1**2 + n2**2) * np.exp(-n1 - n2))))
    semi_err = abs(stats.correlation - 3)
    ok = quantum < 1e-12 and semi_err < 1e-3 and density_err < 1e-6
    verdict(4, ok, f"quantum |<n1n2>| {quantum:.1e} (tol 1e-12); |<n1n2> - 3| {semi_err:.2e} (tol 1e-3); "
                   f"density error {density_err:.1e} (tol 1e-6)")


def test_criterion_5_squeezing(corpus):
    worst = 0.0
    for rho in corpus.values():
        for theta in (0.0, math.pi / 4, math.pi / 2):
            mean, second = quadrature_moments(rho, theta)
            stats = semiquantum_quadrature(rho, theta)
            worst = max(worst, abs(stats.variance - (second - mean**2) - 0.25))
    sq = classicality_verdicts(make_squeezed_vacuum(0.5, FockParams(40)), thetas=(0.0,))[1]
    flags = sq.quantum_violates_bound and not sq.semiquantum_violates_bound
    verdict(5, worst < 1e-5 and flags,
            f"max |Var x - Var X^ - 1/4| {worst:.2e} (tol 1e-5); r=0.5: quantum {sq.quantum_value:.4f} < 1/4, "
            f"semiquantum {sq.semiquantum_value:.4f} >= 1/4")


def test_criterion_6_route_equivalence(number_stats):
    worst = max(float(np.max(np.abs(q.density - k.density))) for _, q, k in number_stats.values())
    verdict(6, worst < 1e-6, f"max |p_N(Q route) - p_N(kernel route)| {worst:.2e} (tol 1e-6)")


def test_criterion_7_classical_closure():
    report = separability_property_suite(seed=0, trials=100)
    ok = report.passes == 100 and report.worst_min >= -1e-8 and report.worst_norm_defect <= 1e-4
    verdict(7, ok, f"{report.passes}/100 trials bona fide; worst min {report.worst_min:.2e} (>= -1e-8); "
                   f"worst |norm - 1| {report.worst_norm_defect:.2e} (tol 1e-4)")


def test_criterion_8_quantum_witness():
    grid = GridSpec.square(6, 241)
    one = make_number_state(1, FockParams(3))
    w = heterodyne_to_wigner(husimi_q_grid(one, grid))
    w0 = w.values[120, 120]
    oracle = wigner_oracle(one, 0)
    rel = abs(w0 - oracle) / abs(oracle)
    coh = heterodyne_to_wigner(husimi_q_grid(make_coherent_state(1.0, FockParams(30)), grid))
    ok = rel < 0.02 and coh.min_value >= -1e-3
    verdict(8, ok, f"W(0,0) of |1> = {w0:.6f} vs {oracle:.6f} (rel {rel:.1e}, tol 2%); "
                   f"coherent min {coh.min_value:.2e} (>= -1e-3); |1> negativity mass {w.negativity_mass:.3f}")


def _parity_expectation(n):
    x = np.linspace(-10, 10, 4001)
    psi = (2 / math.pi) ** 0.25 / math.sqrt(2.0**n * factorial(n)) * eval_hermite(n, math.sqrt(2) * x) * np.exp(-x * x)
    return float(trapezoid_weights(x) @ (psi * psi[::-1]))


def test_criterion_9_convention_anchors():
    thetas = np.linspace(0, math.pi, 7)
    vac = make_number_state(0, FockParams(8))
    exact = all(quadrature_moments(vac, t) == (0.0, 0.25) for t in thetas)
    # the explicit operator product agrees up to rounding of e^{i theta} e^{-i theta}
    ops = ModeOperators(8)
    x2 = max(abs((ops.quadrature(t) @ ops.quadrature(t))[0, 0] - 0.25) for t in thetas)
    worst = 0.0
    for n in range(6):
        value = wigner_oracle(make_number_state(n, FockParams(n + 2)), 0)
        worst = max(worst, abs(value - 2 / math.pi * _parity_expectation(n)), abs(value - 2 / math.pi * (-1) ** n))
    verdict(9, exact and x2 < 1e-16 and worst < 1e-6,
            f"<0|X^2|0> = 1/4 exactly: {exact} (operator product within {x2:.1e}); max |W(|n>,0) - (2/pi) parity integral| {worst:.1e} (tol 1e-6)")
