import numpy as np
import pytest

from entmono.measures import (DecompositionEnsemble, MeasureValue, RoofConfig,
                              concurrence, concurrence_assist,
                              concurrence_pure, concurrence_two_qubit, cren,
                              crenoa, halved_negativity, negativity,
                              negativity_pure, roof_extremize,
                              wclass_one_vs_rest, wclass_pair_value)
from entmono.states import (Bipartition, DensityOperator, PureState,
                            WClassParams, make_wclass, reduce, sample_wclass,
                            uniform_w)

from oracles import (assisted_two_qubit, random_density, random_ket,
                     schmidt_concurrence, schmidt_negativity, wootters)

BELL = PureState.from_vector(np.array([1, 0, 0, 1]) / np.sqrt(2))
AB = Bipartition.of(2, [0])
FAST = RoofConfig(restarts=40)


def a_vs_rest(n):
    return Bipartition.of(n, [0])


def test_concurrence_pure_examples():
    assert concurrence_pure(BELL, AB).value == pytest.approx(1.0, abs=1e-15)
    w4 = make_wclass(uniform_w(4))
    assert concurrence_pure(w4, a_vs_rest(4)).value == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    prod = PureState.from_vector(np.kron([0.6, 0.8], [1, 1j]) / np.sqrt(2))
    assert concurrence_pure(prod, AB).value == pytest.approx(0.0, abs=1e-7)


def test_concurrence_pure_range_and_oracle():
    rng = np.random.default_rng(0)
    for n in range(2, 7):
        psi = PureState.from_vector(random_ket(rng, n))
        for size in range(1, n):
            side = sorted(rng.choice(n, size=size, replace=False).tolist())
            split = Bipartition.of(n, side)
            c = concurrence_pure(psi, split).value
            d = 1 << min(size, n - size)
            assert 0 <= c <= np.sqrt(2 * (d - 1) / d) + 1e-12
            assert c == pytest.approx(schmidt_concurrence(psi.amplitudes, side, n), abs=1e-10)


def test_concurrence_two_qubit_examples():
    assert concurrence_two_qubit(BELL.density()).value == pytest.approx(1.0, abs=1e-7)
    pair = reduce(make_wclass(uniform_w(4)), [0, 1])
    assert concurrence_two_qubit(pair).value == pytest.approx(0.5, abs=1e-7)
    mixed = DensityOperator.from_matrix(np.eye(4) / 4)
    assert concurrence_two_qubit(mixed).value == 0.0
    with pytest.raises(ValueError):
        concurrence_two_qubit(DensityOperator.from_matrix(np.eye(8) / 8))


def test_concurrence_two_qubit_matches_nonhermitian_route():
    rng = np.random.default_rng(1)
    for rank in (2, 3, 4):
        for _ in range(20):
            r = random_density(rng, 2, rank)
            assert concurrence_two_qubit(DensityOperator.from_matrix(r)).value == \
                pytest.approx(wootters(r), abs=1e-7)


def test_concurrence_dispatch():
    w4 = make_wclass(uniform_w(4))
    assert concurrence(w4).method == "closed_form"
    assert concurrence(BELL.density(), AB).value == pytest.approx(1.0, abs=1e-10)
    pair = reduce(w4, [0, 2])
    assert concurrence(pair, AB).value == pytest.approx(0.5, abs=1e-7)


def test_negativity_examples():
    assert negativity(BELL.density(), AB).value == pytest.approx(1.0, abs=1e-12)
    w5 = make_wclass(uniform_w(5))
    assert negativity(w5, a_vs_rest(5)).value == pytest.approx(0.8, abs=1e-10)
    prod = PureState.from_vector(np.kron([0.6, 0.8], [0, 1]))
    assert negativity(prod, AB).value == pytest.approx(0.0, abs=1e-12)
    assert halved_negativity(negativity(BELL, AB).value) == pytest.approx(0.5)


def test_negativity_pure_examples():
    assert negativity_pure(BELL, AB).value == pytest.approx(1.0, abs=1e-12)
    w5 = make_wclass(uniform_w(5))
    assert negativity_pure(w5, a_vs_rest(5)).value == pytest.approx(0.8, abs=1e-12)
    w4 = make_wclass(uniform_w(4))
    # spectrum (3/4, 1/4): (sqrt(3)/2 + 1/2)^2 - 1
    expected = (np.sqrt(3) / 2 + 0.5) ** 2 - 1
    assert negativity_pure(w4, a_vs_rest(4)).value == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(np.sqrt(3) / 2, abs=1e-15)


def test_negativity_pure_matches_mixed_formula():
    rng = np.random.default_rng(2)
    for n in range(2, 7):
        for _ in range(4):
            psi = PureState.from_vector(random_ket(rng, n))
            side = sorted(rng.choice(n, size=int(rng.integers(1, n)), replace=False).tolist())
            split = Bipartition.of(n, side)
            a = negativity_pure(psi, split).value
            assert a == pytest.approx(negativity(psi.density(), split).value, abs=1e-9)
            assert a == pytest.approx(schmidt_negativity(psi.amplitudes, side, n), abs=1e-9)


def test_measure_value_clamps():
    assert MeasureValue(-1e-12, "closed_form").value == 0.0
    with pytest.raises(ValueError):
        MeasureValue(-1e-6, "closed_form")


def test_wclass_pair_value_examples():
    for i in (1, 2, 3):
        assert wclass_pair_value(uniform_w(4), i) == pytest.approx(0.5, abs=1e-15)
    for i in (1, 2, 3, 4):
        assert wclass_pair_value(uniform_w(5), i, "negativity") == pytest.approx(0.4, abs=1e-15)
    zero_a = WClassParams(0, (0.6, 0.8, 0))
    assert all(wclass_pair_value(zero_a, i) == 0 for i in (1, 2, 3))
    with pytest.raises(IndexError):
        wclass_pair_value(uniform_w(4), 4)
    with pytest.raises(IndexError):
        wclass_pair_value(uniform_w(4), 0)


def test_wclass_pair_value_matches_wootters():
    for seed in range(40):
        params = sample_wclass(4 + seed % 3, seed)
        psi = make_wclass(params)
        for i in range(1, params.num_qubits):
            assert wclass_pair_value(params, i) == pytest.approx(
                wootters(reduce(psi, [0, i]).matrix), abs=1e-7)


def test_wclass_one_vs_rest_examples():
    w4 = uniform_w(4)
    assert wclass_one_vs_rest(w4, [2, 3]) == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    for seed in range(10):
        params = sample_wclass(5, seed)
        full = wclass_one_vs_rest(params, range(1, 5))
        assert full == pytest.approx(
            concurrence_pure(make_wclass(params), a_vs_rest(5)).value, abs=1e-12)
    assert wclass_one_vs_rest(WClassParams(0, (1, 0, 0)), [1, 2]) == 0
    with pytest.raises(ValueError):
        wclass_one_vs_rest(w4, [])


def test_wclass_one_vs_rest_roof_oracle_w4():
    rho = reduce(make_wclass(uniform_w(4)), [0, 2, 3])
    res = roof_extremize(rho, a_vs_rest(3), "concurrence", "min", FAST)
    assert res.value == pytest.approx(1 / np.sqrt(2), abs=1e-6)


@pytest.mark.parametrize("n,size", [(4, 2), (5, 2), (5, 3)])
def test_wclass_one_vs_rest_matches_roof(n, size):
    rng = np.random.default_rng(100 * n + size)
    for _ in range(3):
        params = sample_wclass(n, int(rng.integers(2 ** 31)))
        subset = sorted(rng.choice(np.arange(1, n), size=size, replace=False).tolist())
        rho = reduce(make_wclass(params), [0] + subset)
        for kernel in ("concurrence", "negativity"):
            ref = wclass_one_vs_rest(params, subset, kernel)
            for sense in ("min", "max"):
                res = roof_extremize(rho, a_vs_rest(size + 1), kernel, sense, FAST)
                assert res.value == pytest.approx(ref, abs=1e-3)


def test_local_phase_invariance():
    rng = np.random.default_rng(5)
    for seed in range(10):
        params = sample_wclass(5, seed)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
        c = params.coefficients() * phases
        rotated = WClassParams(c[0], tuple(c[1:]))
        psi, psi2 = make_wclass(params), make_wclass(rotated)
        split = a_vs_rest(5)
        assert abs(concurrence_pure(psi, split).value - concurrence_pure(psi2, split).value) <= 1e-9
        assert abs(negativity(psi, split).value - negativity(psi2, split).value) <= 1e-9
        for i in range(1, 5):
            assert abs(concurrence_two_qubit(reduce(psi, [0, i])).value
                       - concurrence_two_qubit(reduce(psi2, [0, i])).value) <= 1e-9
            assert wclass_pair_value(params, i) == pytest.approx(
                wclass_pair_value(rotated, i), abs=1e-12)


def test_assisted_and_roof_wrappers_on_pure_inputs():
    w4 = make_wclass(uniform_w(4))
    split = a_vs_rest(4)
    assert concurrence_assist(w4, split).value == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    assert cren(w4, split).value == crenoa(w4, split).value == negativity_pure(w4, split).value


def test_assisted_on_mixed_states():
    w5 = make_wclass(uniform_w(5))
    pair = reduce(w5, [0, 1])
    assert concurrence_assist(pair, AB, FAST).value == pytest.approx(0.4, abs=1e-6)
    assert cren(pair, AB, FAST).value == pytest.approx(0.4, abs=1e-6)
    assert crenoa(pair, AB, FAST).value == pytest.approx(0.4, abs=1e-6)
    sep = DensityOperator.from_matrix(np.diag([0.1, 0.2, 0.3, 0.4]))
    assert cren(sep, AB, FAST).value == pytest.approx(0.0, abs=1e-6)


def test_assisted_maximally_mixed():
    # I/4 is an equal mixture of the four Bell states, so the assisted value is 1
    mixed = DensityOperator.from_matrix(np.eye(4) / 4)
    res = concurrence_assist(mixed, AB, RoofConfig(restarts=200))
    assert res.value == pytest.approx(1.0, abs=1e-6)
    assert res.value == pytest.approx(assisted_two_qubit(mixed.matrix), abs=1e-6)
    assert res.ensemble.reconstruction_error(mixed) <= 1e-8
