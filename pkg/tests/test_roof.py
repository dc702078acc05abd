import numpy as np
import pytest

from entmono.roof import (DecompositionEnsemble, RoofConfig, roof_extremize,
                          weighted_kernel)
from entmono.measures import concurrence_pure, negativity_pure
from entmono.states import Bipartition, DensityOperator, PureState

from oracles import assisted_two_qubit, random_density, random_ket, wootters

FAST = RoofConfig(restarts=30)
AB = Bipartition.of(2, [0])


def test_config_validation():
    with pytest.raises(ValueError):
        RoofConfig(restarts=0)
    with pytest.raises(ValueError):
        RoofConfig(max_iters=0)


def test_ensemble_validation():
    with pytest.raises(ValueError):
        DecompositionEnsemble([0.5, 0.6], np.eye(2))
    with pytest.raises(ValueError):
        DecompositionEnsemble([1.0], np.array([[1.0, 1.0]]))
    ens = DecompositionEnsemble([0.25, 0.75], np.eye(2))
    assert np.allclose(ens.density(), np.diag([0.25, 0.75]))
    assert len(ens) == 2


def test_weighted_kernel_is_homogeneous_of_degree_two():
    rng = np.random.default_rng(3)
    for n, d_a in ((2, 2), (3, 2), (3, 4), (4, 4)):
        x = random_ket(rng, n)
        for kernel in ("concurrence", "negativity"):
            f1 = weighted_kernel(x[None], d_a, kernel)[0]
            f2 = weighted_kernel(2.5 * x[None], d_a, kernel)[0]
            assert f2 == pytest.approx(6.25 * f1, rel=1e-12)


def test_weighted_kernel_matches_pure_formulas():
    rng = np.random.default_rng(4)
    for n in (2, 3, 4):
        for size in range(1, n):
            psi = PureState.from_vector(random_ket(rng, n))
            split = Bipartition.of(n, list(range(size)))
            d_a = 1 << size
            c = weighted_kernel(psi.amplitudes[None], d_a, "concurrence")[0]
            m = weighted_kernel(psi.amplitudes[None], d_a, "negativity")[0]
            assert c == pytest.approx(concurrence_pure(psi, split).value, abs=1e-10)
            assert m == pytest.approx(negativity_pure(psi, split).value, abs=1e-10)


@pytest.mark.parametrize("rank", [2, 3, 4])
def test_ensemble_reconstructs_rho(rank):
    rng = np.random.default_rng(rank)
    rho = DensityOperator.from_matrix(random_density(rng, 2, rank))
    for kernel in ("concurrence", "negativity"):
        for sense in ("min", "max"):
            res = roof_extremize(rho, AB, kernel, sense, FAST)
            assert res.method == "roof_opt"
            assert res.ensemble.reconstruction_error(rho) <= 1e-8


def test_ensemble_reconstructs_rho_on_non_leading_split():
    rng = np.random.default_rng(11)
    rho = DensityOperator.from_matrix(random_density(rng, 3, 2))
    split = Bipartition.of(3, [1])
    res = roof_extremize(rho, split, "concurrence", "min", FAST)
    assert res.ensemble.reconstruction_error(rho) <= 1e-8
    # the ensemble's own average must reproduce the reported value
    avg = sum(p * concurrence_pure(PureState.from_vector(m, normalize=True), split).value
              for p, m in zip(res.ensemble.weights, res.ensemble.members))
    assert avg == pytest.approx(res.value, abs=1e-9)


def test_pure_state_collapse():
    rng = np.random.default_rng(5)
    for n in (2, 3):
        psi = PureState.from_vector(random_ket(rng, n))
        split = Bipartition.of(n, [0])
        ref_c = concurrence_pure(psi, split).value
        ref_n = negativity_pure(psi, split).value
        for sense in ("min", "max"):
            res_c = roof_extremize(psi, split, "concurrence", sense, FAST)
            res_n = roof_extremize(psi.density(), split, "negativity", sense, FAST)
            assert res_c.value == pytest.approx(ref_c, abs=1e-10)
            assert res_n.value == pytest.approx(ref_n, abs=1e-10)
            assert len(res_c.ensemble) == 1


def test_two_qubit_oracles():
    rng = np.random.default_rng(6)
    for _ in range(5):
        rho_m = random_density(rng, 2, 2)
        rho = DensityOperator.from_matrix(rho_m)
        lo = roof_extremize(rho, AB, "concurrence", "min", FAST).value
        hi = roof_extremize(rho, AB, "concurrence", "max", FAST).value
        assert lo == pytest.approx(wootters(rho_m), abs=1e-6)
        assert hi == pytest.approx(assisted_two_qubit(rho_m), abs=1e-6)
        assert lo <= hi + 1e-12


def test_min_not_above_max_on_three_qubits():
    rng = np.random.default_rng(7)
    rho = DensityOperator.from_matrix(random_density(rng, 3, 2))
    split = Bipartition.of(3, [0])
    for kernel in ("concurrence", "negativity"):
        lo = roof_extremize(rho, split, kernel, "min", FAST).value
        hi = roof_extremize(rho, split, kernel, "max", FAST).value
        assert lo <= hi + 1e-12


def test_ensemble_smaller_than_rank_rejected():
    rho = DensityOperator.from_matrix(np.eye(4) / 4)
    with pytest.raises(ValueError):
        roof_extremize(rho, AB, "concurrence", "min", RoofConfig(restarts=2, ensemble_size=3))


def test_bad_kernel_and_sense():
    rho = DensityOperator.from_matrix(np.eye(4) / 4)
    with pytest.raises(ValueError):
        roof_extremize(rho, AB, "entropy", "min", FAST)
    with pytest.raises(ValueError):
        roof_extremize(rho, AB, "concurrence", "mean", FAST)


def test_seeded_runs_are_deterministic():
    rng = np.random.default_rng(8)
    rho = DensityOperator.from_matrix(random_density(rng, 2, 3))
    cfg = RoofConfig(restarts=8, rng_seed=99)
    a = roof_extremize(rho, AB, "negativity", "max", cfg)
    b = roof_extremize(rho, AB, "negativity", "max", cfg)
    assert a.value == b.value
    assert np.array_equal(a.ensemble.members, b.ensemble.members)


def test_iteration_cap_reports_nonconvergence():
    rng = np.random.default_rng(9)
    rho = DensityOperator.from_matrix(random_density(rng, 2, 4))
    res = roof_extremize(rho, AB, "concurrence", "min", RoofConfig(restarts=4, max_iters=1))
    assert not res.converged
    assert res.value >= 0
