"""Scenario pipelines. Each returns a ScenarioReport whose comparisons pit
computed values against closed-form predictions or independent oracles."""

from __future__ import annotations

import math
import time

import numpy as np

from ..detectors import (
    classicality_verdicts,
    joint_number_via_kernel,
    quantum_joint_number_correlation,
    semiquantum_joint_number,
    semiquantum_number_via_kernel,
    semiquantum_number_via_q,
)
from ..errors import TruncationError
from ..fock import (
    BeamSplitterParams,
    FockParams,
    TwoModeState,
    apply_beam_splitter,
    make_coherent_state,
    make_number_state,
    make_squeezed_vacuum,
    photon_number_distribution,
    photon_number_moments,
    quadrature_moments,
)
from ..inversion import heterodyne_to_wigner, separability_property_suite
from ..quasiprob import GridSpec, husimi_q_grid, wigner_oracle
from .report import ScenarioReport

TWO_OVER_PI = 2.0 / math.pi


def _auto_dim(make, dim, start):
    """Build with the requested dim, or with the smallest admissible one
    (found from the truncation gate) when dim is None."""
    if dim is not None:
        return make(FockParams(dim))
    try:
        return make(FockParams(start))
    except TruncationError as exc:
        if exc.required_dim is None:
            raise
        return make(FockParams(exc.required_dim))


def run_subpoisson(cfg):
    """Number state |m> read by a photon counter and by a continuous-number detector."""
    m = cfg.m
    rho = make_number_state(m, FockParams(cfg.dim or m + 2))
    mean, second = photon_number_moments(rho)
    var = second - mean**2
    via_q = semiquantum_number_via_q(rho)
    via_k = semiquantum_number_via_kernel(photon_number_distribution(rho), via_q.n_grid)
    verdict = classicality_verdicts(rho, thetas=())[0]
    rep = ScenarioReport("subpoisson", cfg.inputs())
    rep.quantum = {"mean": mean, "variance": var, "mandel_q": var / mean - 1 if mean else 0.0,
                   "subpoissonian": verdict.quantum_violates_bound}
    rep.semiquantum = {"mean": via_q.mean, "variance": via_q.variance, "closed_mean": via_k.closed_mean,
                       "closed_variance": via_k.closed_variance,
                       "subpoissonian": verdict.semiquantum_violates_bound}
    rep.check("quantum variance", var, 0.0, 1e-12, "closed-form")
    rep.check("semiquantum mean (grid)", via_q.mean, m + 1, 1e-5, "closed-form")
    rep.check("semiquantum mean (closed form)", via_k.closed_mean, m + 1, 1e-10, "closed-form")
    rep.check("semiquantum variance", via_q.variance, var + mean + 1, 1e-5, "closed-form")
    rep.check("semiquantum variance (closed form)", via_k.closed_variance, var + mean + 1, 1e-10, "closed-form")
    rep.check("semiquantum variance minus mean", via_k.closed_variance - via_k.closed_mean, 0.0, 1e-9, "bound", "ge")
    rep.check("route discrepancy", float(np.max(np.abs(via_q.density - via_k.density))), 0.0, 1e-6, "oracle")
    return rep


def _single_photon_output(T, phase, dim):
    return apply_beam_splitter(TwoModeState.number_state(1, 0, dim), BeamSplitterParams(T, phase=phase))


def run_anticorrelation(cfg):
    """One photon on a beam splitter; coincidences with photon counters and
    with continuous-number detectors."""
    dim = cfg.dim or 3
    out = _single_photon_output(cfg.T, cfg.phase, dim)
    swapped = _single_photon_output(1.0 - cfg.T, cfg.phase, dim)
    stats = semiquantum_joint_number(out)
    swapped_corr = semiquantum_joint_number(swapped).correlation
    quantum = quantum_joint_number_correlation(out)
    rep = ScenarioReport("anticorrelation", cfg.inputs())
    rep.quantum = {"n1n2": quantum}
    rep.semiquantum = {"n1n2": stats.correlation, "n1n2_swapped": swapped_corr,
                       "normalization": stats.normalization}
    rep.check("quantum <n1 n2>", quantum, 0.0, 1e-12, "closed-form")
    rep.check("semiquantum <n1 n2>", stats.correlation, 2.0, 1e-3, "closed-form")
    rep.check("T <-> R invariance", stats.correlation - swapped_corr, 0.0, 1e-6, "closed-form")
    return rep


def run_hom(cfg):
    """|1,1> on a balanced beam splitter."""
    dim = cfg.dim or 3
    out = apply_beam_splitter(TwoModeState.number_state(1, 1, dim), BeamSplitterParams(0.5, phase=cfg.phase))
    p = out.joint_photon_distribution()
    stats = semiquantum_joint_number(out)
    n1, n2 = np.meshgrid(stats.n1_grid, stats.n2_grid, indexing="ij")
    target = 0.25 * (n1**2 + n2**2) * np.exp(-n1 - n2)
    kernel = joint_number_via_kernel(out, stats.n1_grid, stats.n2_grid)
    quantum = quantum_joint_number_correlation(out)
    rep = ScenarioReport("hom", cfg.inputs())
    rep.quantum = {"n1n2": quantum, "p11": float(p[1, 1]), "p20": float(p[2, 0]), "p02": float(p[0, 2])}
    rep.semiquantum = {"n1n2": stats.correlation, "normalization": stats.normalization}
    rep.check("quantum <n1 n2>", quantum, 0.0, 1e-12, "closed-form")
    rep.check("quantum p(1,1)", p[1, 1], 0.0, 1e-12, "closed-form")
    rep.check("semiquantum <n1 n2>", stats.correlation, 3.0, 1e-3, "closed-form")
    rep.check("joint density vs closed form", float(np.max(np.abs(stats.density - target))), 0.0, 1e-6,
              "closed-form")
    rep.check("joint density vs kernel route", float(np.max(np.abs(stats.density - kernel))), 0.0, 1e-6,
              "oracle")
    return rep


def run_squeezing(cfg):
    """Squeezed vacuum read by a homodyne (quantum) and a sharp classical quadrature detector."""
    r, theta = cfg.r, cfg.theta
    rho = _auto_dim(lambda p: make_squeezed_vacuum(r, p), cfg.dim, 40)
    mean, second = quadrature_moments(rho, theta)
    var = second - mean**2
    expected = (math.exp(-2 * r) * math.cos(theta) ** 2 + math.exp(2 * r) * math.sin(theta) ** 2) / 4
    verdict = classicality_verdicts(rho, thetas=(theta,))[1]
    rep = ScenarioReport("squeezing", dict(cfg.inputs(), dim=rho.dim))
    rep.quantum = {"mean": mean, "variance": var, "squeezed": verdict.quantum_violates_bound}
    rep.semiquantum = {"variance": verdict.semiquantum_value, "squeezed": verdict.semiquantum_violates_bound}
    rep.check("quantum variance", var, expected, 1e-6, "oracle")
    rep.check("semiquantum variance", verdict.semiquantum_value, var + 0.25, 1e-5, "closed-form")
    rep.check("semiquantum variance bound", verdict.semiquantum_value, 0.25, 1e-9, "bound", "ge")
    return rep


def run_wigner_negativity(cfg):
    """Heterodyne statistics of |m> deconvolved into the Wigner function, with
    a coherent-state control through the same pipeline."""
    m = cfg.m
    n = 2 * int(round(cfg.grid_half_width / cfg.grid_step)) + 1
    grid = GridSpec.square(cfg.grid_half_width, n)
    rho = make_number_state(m, FockParams(cfg.dim or m + 2))
    w = heterodyne_to_wigner(husimi_q_grid(rho, grid))
    centre = n // 2
    oracle = wigner_oracle(rho, w.x_grid[:, None] + 1j * w.y_grid[None, :])
    beta = cfg.beta
    coh = _auto_dim(lambda p: make_coherent_state(beta, p), None, 30)
    w_coh = heterodyne_to_wigner(husimi_q_grid(coh, grid))
    expected = TWO_OVER_PI * (-1) ** m
    rep = ScenarioReport("wigner-negativity", cfg.inputs())
    rep.quantum = {"w_origin": float(w.values[centre, centre]), "min": w.min_value,
                   "negativity_mass": w.negativity_mass, "norm_defect": w.norm_defect,
                   "cutoff": w.meta["cutoff"], "cutoff_residual": w.meta["residual"]}
    rep.semiquantum = {"coherent_min": w_coh.min_value, "coherent_negativity_mass": w_coh.negativity_mass}
    rep.check("W(0) of |m>", w.values[centre, centre], expected, 0.02 * TWO_OVER_PI, "oracle")
    rep.check("max |W - Laguerre oracle|", float(np.max(np.abs(w.values - oracle))), 0.0, 2e-2, "oracle")
    if m % 2:
        rep.check("negativity mass", w.negativity_mass, 0.05, 0.0, "bound", "ge")
    rep.check("coherent control min", w_coh.min_value, 0.0, 1e-3, "bound", "ge")
    rep.fields = {"wigner": w}
    return rep


def run_separability_suite(cfg):
    """Randomized classical models: observed -> inversion -> bona fide check."""
    suite = separability_property_suite(cfg.seed, cfg.trials)
    rep = ScenarioReport("separability-suite", cfg.inputs())
    rep.quantum = {"control_min": suite.quantum_control.min_value,
                   "control_negativity_mass": suite.quantum_control.negativity_mass,
                   "control_passed": suite.quantum_control.passed}
    rep.semiquantum = {"passes": suite.passes, "worst_min": suite.worst_min,
                       "worst_norm_defect": suite.worst_norm_defect,
                       "failures": [t.model for t in suite.failures]}
    rep.check("trials passing", suite.passes, cfg.trials, 0, "bound")
    rep.check("worst inferred minimum", suite.worst_min, 0.0, 1e-8, "bound", "ge")
    rep.check("worst normalization defect", suite.worst_norm_defect, 0.0, 1e-4, "bound", "le")
    rep.check("quantum control flagged", float(not suite.quantum_control.passed), 1.0, 0, "bound")
    return rep


RUNNERS = {
    "subpoisson": run_subpoisson,
    "anticorrelation": run_anticorrelation,
    "hom": run_hom,
    "squeezing": run_squeezing,
    "wigner-negativity": run_wigner_negativity,
    "separability-suite": run_separability_suite,
}


def run_scenario(cfg):
    start = time.perf_counter()
    report = RUNNERS[cfg.scenario](cfg)
    report.wall_time = time.perf_counter() - start
    return report
