import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiquantum.detectors import (
    ContinuousNumber,
    QuantumNumber,
    RotatedQuadrature,
    classicality_verdicts,
    default_number_grid,
    joint_number_via_kernel,
    quantum_joint_number_correlation,
    semiquantum_joint_number,
    semiquantum_number_via_kernel,
    semiquantum_number_via_q,
    semiquantum_quadrature,
)
from semiquantum.errors import GridCoverageError
from semiquantum.fock import (
    BeamSplitterParams,
    DensityMatrix,
    FockParams,
    TwoModeState,
    apply_beam_splitter,
    make_coherent_state,
    make_number_state,
    make_squeezed_vacuum,
    mixture,
    photon_number_distribution,
    photon_number_moments,
    quadrature_distribution,
    quadrature_moments,
)


def test_detector_kinds():
    assert ContinuousNumber.classical and RotatedQuadrature.classical
    assert not QuantumNumber.classical
    assert RotatedQuadrature(0.3).blur == 0


def test_vacuum_and_single_photon_densities():
    for m, shape in ((0, lambda n: np.exp(-n)), (1, lambda n: n * np.exp(-n))):
        stats = semiquantum_number_via_q(make_number_state(m, FockParams(m + 2)))
        assert np.max(np.abs(stats.density - shape(stats.n_grid))) < 1e-8


def test_kernel_route_examples():
    two = semiquantum_number_via_kernel(photon_number_distribution(make_number_state(2, FockParams(4))))
    assert two.closed_mean == 3 and two.closed_variance == 3
    assert abs(two.mean - 3) < 1e-6 and abs(two.variance - 3) < 1e-5
    coh = semiquantum_number_via_kernel(photon_number_distribution(make_coherent_state(1.0, FockParams(30))))
    assert abs(coh.closed_mean - 2) < 1e-6 and abs(coh.closed_variance - 3) < 1e-6
    vac = semiquantum_number_via_kernel([1.0, 0.0])
    assert vac.closed_mean == 1 and vac.closed_variance == 1


def test_kernel_stable_at_high_photon_number():
    p = np.zeros(61)
    p[60] = 1
    stats = semiquantum_number_via_kernel(p)
    assert np.all(np.isfinite(stats.density))
    assert abs(stats.mean - 61) < 1e-6


def test_number_grid_covers_tail():
    g = default_number_grid(np.array([1.0]))
    assert g[-1] > 23
    assert len(g) % 2 == 1


def test_undercovering_grid_reports_deficit():
    with pytest.raises(GridCoverageError) as info:
        semiquantum_number_via_q(make_number_state(3, FockParams(5)), np.linspace(0, 3, 301))
    assert info.value.deficit > 0.1


def test_phase_node_doubling_is_inert():
    rho = make_squeezed_vacuum(0.5, FockParams(40))
    grid = np.linspace(0, 30, 3001)
    a = semiquantum_number_via_q(rho, grid, phase_nodes=256).density
    b = semiquantum_number_via_q(rho, grid, phase_nodes=512).density
    assert np.max(np.abs(a - b)) < 1e-10


def random_mixture(rng, dim):
    vecs = rng.normal(size=(dim, 3)) + 1j * rng.normal(size=(dim, 3))
    rho = vecs @ vecs.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_route_equivalence_random_mixtures(seed):
    rho = random_mixture(np.random.default_rng(seed), 6)
    via_q = semiquantum_number_via_q(rho)
    via_k = semiquantum_number_via_kernel(photon_number_distribution(rho), via_q.n_grid)
    assert np.max(np.abs(via_q.density - via_k.density)) < 1e-6
    mean, second = photon_number_moments(rho)
    assert abs(via_q.mean - mean - 1) < 1e-6
    assert abs(via_q.variance - (second - mean**2) - via_q.mean) < 1e-5


@pytest.mark.parametrize("T", [0.3, 0.5, 0.7])
def test_single_photon_joint_density(T):
    out = apply_beam_splitter(TwoModeState.number_state(1, 0, 3), BeamSplitterParams(T, phase=0.9))
    stats = semiquantum_joint_number(out)
    n1, n2 = np.meshgrid(stats.n1_grid, stats.n2_grid, indexing="ij")
    # with this splitter convention the transmitted port is mode 1
    assert np.max(np.abs(stats.density - (T * n1 + (1 - T) * n2) * np.exp(-n1 - n2))) < 1e-10
    assert abs(stats.correlation - 2) < 1e-3
    assert quantum_joint_number_correlation(out) < 1e-12


def test_anticorrelation_convention_independence():
    values = []
    for T in (0.3, 0.7):
        for phase in (0.0, 1.1, -2.5):
            out = apply_beam_splitter(TwoModeState.number_state(1, 0, 3), BeamSplitterParams(T, phase=phase))
            values.append(semiquantum_joint_number(out).correlation)
    assert max(values) - min(values) < 1e-6


def test_hom_and_vacuum_joint():
    hom = apply_beam_splitter(TwoModeState.number_state(1, 1, 3), BeamSplitterParams(0.5))
    stats = semiquantum_joint_number(hom)
    n1, n2 = np.meshgrid(stats.n1_grid, stats.n2_grid, indexing="ij")
    assert np.max(np.abs(stats.density - 0.25 * (n1**2 + n2**2) * np.exp(-n1 - n2))) < 1e-6
    assert abs(stats.correlation - 3) < 1e-3
    assert np.max(np.abs(stats.density - joint_number_via_kernel(hom, stats.n1_grid, stats.n2_grid))) < 1e-12
    vac = semiquantum_joint_number(TwoModeState.number_state(0, 0, 3))
    assert abs(vac.correlation - 1) < 1e-3
    assert quantum_joint_number_correlation(TwoModeState.number_state(1, 1, 3)) == 1


def test_joint_distribution_view():
    stats = semiquantum_joint_number(TwoModeState.number_state(0, 1, 3))
    dist = stats.as_distribution()
    assert abs(dist.normalization - 1) < 1e-6
    assert dist.min_value >= 0


def test_quadrature_examples():
    vac = semiquantum_quadrature(make_number_state(0, FockParams(4)), 0.0)
    assert abs(vac.variance - 0.5) < 1e-5
    one = semiquantum_quadrature(make_number_state(1, FockParams(4)), 0.0)
    i0 = np.argmin(np.abs(one.x_grid))
    assert one.density[i0] > 0.1
    assert quadrature_distribution(make_number_state(1, FockParams(4)), 0.0, one.x_grid)[i0] < 1e-10
    assert one.route_discrepancy < 1e-6


def test_quadrature_variance_approaches_vacuum_bound():
    prev = None
    for r in (0.4, 0.8, 1.2):
        rho = make_squeezed_vacuum(r, FockParams(120))
        var = semiquantum_quadrature(rho, 0.0).variance
        assert var > 0.25
        if prev is not None:
            assert var < prev
        prev = var
    assert prev - 0.25 < 0.025


@pytest.mark.parametrize("theta", [0.0, math.pi / 4, math.pi / 2])
def test_quadrature_theorem_coherent(theta):
    rho = make_coherent_state(1.0 + 0.5j, FockParams(32))
    stats = semiquantum_quadrature(rho, theta)
    mean, second = quadrature_moments(rho, theta)
    assert abs(stats.mean - mean) < 1e-8
    assert abs(stats.variance - (second - mean**2) - 0.25) < 1e-5


def test_verdicts():
    one = {v.quantity: v for v in classicality_verdicts(make_number_state(1, FockParams(3)))}
    assert one["number"].quantum_violates_bound and not one["number"].semiquantum_violates_bound
    assert one["number"].quantum_value == pytest.approx(-1)
    assert one["number"].semiquantum_value == pytest.approx(0, abs=1e-12)
    sq = classicality_verdicts(make_squeezed_vacuum(0.5, FockParams(40)), thetas=(0.0,))
    assert sq[1].quantum_value == pytest.approx(math.exp(-1) / 4, abs=1e-6)
    assert sq[1].semiquantum_value == pytest.approx((math.exp(-1) + 1) / 4, abs=1e-5)
    assert sq[1].quantum_violates_bound and not sq[1].semiquantum_violates_bound
    coh = classicality_verdicts(make_coherent_state(0.8, FockParams(30)))
    assert not any(v.quantum_violates_bound or v.semiquantum_violates_bound for v in coh)
    hom = apply_beam_splitter(TwoModeState.number_state(1, 1, 3), BeamSplitterParams(0.5))
    cross = classicality_verdicts(hom)[0]
    assert cross.quantity == "cross-correlation"
    assert cross.quantum_violates_bound and not cross.semiquantum_violates_bound


def test_superpoissonian_mixtures_of_number_states():
    rng = np.random.default_rng(11)
    for _ in range(20):
        w = rng.dirichlet(np.ones(5))
        rho = mixture([make_number_state(m, FockParams(6)) for m in range(5)], w)
        stats = semiquantum_number_via_kernel(photon_number_distribution(rho))
        assert stats.closed_variance >= stats.closed_mean - 1e-9
