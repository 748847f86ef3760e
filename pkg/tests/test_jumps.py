import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ocolab.errors import ZeroJumpWeight
from ocolab.fock import DensityMatrix, photon_statistics, prepare_coherent, prepare_fock, prepare_squeezed_vacuum, prepare_thermal
from ocolab.jumps import (
    A,
    E,
    N,
    Beta,
    H,
    JumpModel,
    apply_jump,
    chi0_branches,
    jump_weights,
    lowering_operator,
    mean_after_jump,
    predict_distribution,
    predict_pn,
)

ALL_MODELS = [A, E, N, H(0.5), H(2.0), H(7.3), Beta(0.0), Beta(0.25), Beta(0.5), Beta(1.0)]


def dense_operator(model, d):
    """Jump operator built from its factored form, e.g. (1+n)^-b a."""
    n = np.arange(d)
    if model.tag == "N":
        return np.diag(n).astype(complex)
    a = np.diag(np.sqrt(n[1:]), 1)
    if model.tag == "A":
        return a
    if model.tag == "E":
        return np.diag(1 / np.sqrt(1.0 + n)) @ a
    if model.tag == "H":
        return np.diag(np.sin(model.param * np.sqrt(n + 1.0))) @ np.diag(1 / np.sqrt(1.0 + n)) @ a
    return np.diag((1.0 + n) ** -model.param) @ a


def dense_jump(model, rho):
    op = dense_operator(model, rho.dim)
    out = op @ rho.elements @ op.conj().T
    return out / np.trace(out).real, np.trace(out).real


def random_diagonal(rng, d=30):
    chi = rng.random(d) * np.exp(-rng.random() * 0.5 * np.arange(d))
    return chi / chi.sum()


def random_state(rng, d=20):
    g = rng.normal(size=(d, 3)) + 1j * rng.normal(size=(d, 3))
    g *= np.exp(-0.2 * np.arange(d))[:, None]
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


class TestModels:
    def test_parse_roundtrip(self):
        for m in ALL_MODELS:
            assert JumpModel.parse(str(m)) == m
        assert JumpModel.parse("H(2)") == H(2.0)

    @pytest.mark.parametrize("bad", ["X", "H", "H(-1)", "Beta(-0.1)", "A(1)", "H(abc)"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            JumpModel.parse(bad)


class TestLoweringOperator:
    def test_a_weight(self):
        assert lowering_operator(A, 6).weights[4] == 2.0

    def test_e_weight(self):
        assert np.all(lowering_operator(E, 10).weights[1:] == 1.0)

    def test_h_sine_zero(self):
        assert abs(lowering_operator(H(math.pi), 4).weights[1]) < 1e-15

    def test_beta_weights(self):
        w = lowering_operator(Beta(0.25), 10).weights
        assert w[9] == pytest.approx(9**0.25)

    def test_n_has_none(self):
        with pytest.raises(ValueError):
            lowering_operator(N, 5)

    def test_small_dim(self):
        with pytest.raises(ValueError):
            lowering_operator(A, 1)

    @pytest.mark.parametrize("model", [m for m in ALL_MODELS if m.lowers])
    def test_matches_dense_operator(self, model):
        op = lowering_operator(model, 12).matrix()
        assert np.max(np.abs(op - dense_operator(model, 12))) < 1e-14


class TestApplyJump:
    def test_a_on_fock_three(self):
        out = apply_jump(A, prepare_fock(3))
        assert out.norm == pytest.approx(3.0)
        assert out.state.chi[2] == pytest.approx(1.0)
        assert photon_statistics(out.state).mean == pytest.approx(2.0)

    def test_a_on_vacuum(self):
        with pytest.raises(ZeroJumpWeight):
            apply_jump(A, prepare_fock(0))

    def test_h_all_levels_on_zeros(self):
        with pytest.raises(ZeroJumpWeight):
            apply_jump(H(math.pi), prepare_fock(1))

    def test_e_thermal_fixed_point(self):
        rho = prepare_thermal(0.8)
        chi_f = apply_jump(E, rho).state.chi
        assert np.max(np.abs(chi_f[:-1] - rho.chi[:-1])) <= 1e-10 + rho.tail_mass_bound

    def test_a_coherent_fixed_point(self):
        rho = prepare_coherent(1.5)
        chi_f = apply_jump(A, rho).state.chi
        assert np.max(np.abs(chi_f[:-1] - rho.chi[:-1])) <= 1e-10 + rho.tail_mass_bound
        # the coherent projector is an eigenstate of a (.) a^dag below the emptied top level
        out = apply_jump(A, rho).state.elements
        assert np.max(np.abs(out[:-1, :-1] - rho.elements[:-1, :-1])) < 1e-12

    @pytest.mark.parametrize("model", ALL_MODELS)
    def test_matches_dense_reference(self, model):
        rng = np.random.default_rng(7)
        for _ in range(5):
            rho = random_state(rng)
            ref, norm = dense_jump(model, rho)
            out = apply_jump(model, rho)
            assert np.max(np.abs(out.state.elements - ref)) < 1e-12
            assert out.norm == pytest.approx(norm, rel=1e-12)
            out.state.check()
            assert out.state.trace == pytest.approx(1.0, abs=1e-15)

    def test_n_model_preserves_number(self):
        out = apply_jump(N, prepare_fock(3))
        assert out.state.chi[3] == pytest.approx(1.0)
        assert out.norm == 9.0


class TestPredict:
    def test_a_thermal_p0(self):
        chi = prepare_thermal((1 - 0.6) / 0.6).chi
        assert predict_pn(A, chi, 0) == pytest.approx(0.36, abs=1e-12)

    def test_a_thermal_p1(self):
        chi = prepare_thermal((1 - 0.6) / 0.6).chi
        assert predict_pn(A, chi, 1) == pytest.approx(0.288, abs=1e-12)

    def test_e_coherent_p0(self):
        chi = prepare_coherent(1.0).chi
        c0 = math.exp(-1)
        assert predict_pn(E, chi, 0) == pytest.approx(c0 / (1 - c0), abs=1e-12)
        assert predict_pn(E, chi, 0) == pytest.approx(0.582, abs=5e-4)

    def test_e_coherent_closed_forms(self):
        c0 = 0.45
        chi = prepare_coherent(math.sqrt(-math.log(c0))).chi
        lnc = -math.log(c0)
        assert predict_pn(E, chi, 0) == pytest.approx(c0 * lnc / (1 - c0), abs=1e-12)
        assert predict_pn(E, chi, 1) == pytest.approx(c0 * lnc**2 / (2 * (1 - c0)), abs=1e-12)

    def test_a_factor_is_n_plus_one(self):
        # P_2 separates (n+1) from (n+1)!: direct <2|a rho a^dag|2> = 3 chi_3
        chi = prepare_thermal(1.3).chi
        direct = 3 * chi[3] / (np.arange(chi.size) @ chi)
        assert predict_pn(A, chi, 2) == pytest.approx(direct, rel=1e-13)

    def test_degenerate(self):
        vac = prepare_fock(0, dim=4).chi
        for m in (A, E, N, H(1.0)):
            with pytest.raises(ValueError):
                predict_pn(m, vac, 0)

    def test_beyond_support(self):
        assert predict_pn(A, prepare_fock(2).chi, 10) == 0.0

    def test_h_formula(self):
        y = 2.3
        chi = prepare_thermal(0.9).chi
        n = np.arange(chi.size)
        den = sum(math.sin(y * math.sqrt(k)) ** 2 * chi[k] for k in n)
        for k in range(4):
            expected = math.sin(y * math.sqrt(k + 1)) ** 2 * chi[k + 1] / den
            assert predict_pn(H(y), chi, k) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_MODELS))
def test_prediction_matches_jump(seed, model):
    chi = random_diagonal(np.random.default_rng(seed))
    out = apply_jump(model, DensityMatrix.from_diagonal(chi))
    assert np.max(np.abs(out.state.chi - predict_distribution(model, chi))) <= 1e-12


def test_moment_identities_random_states():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        rho = DensityMatrix.from_diagonal(random_diagonal(rng))
        stats = photon_statistics(rho)
        mean_a = photon_statistics(apply_jump(A, rho).state).mean
        mean_e = photon_statistics(apply_jump(E, rho).state).mean
        assert abs(mean_a - (stats.mean + stats.mandel_q)) <= 1e-10 * abs(mean_a)
        assert abs(mean_e - (stats.mean / (1 - stats.chi[0]) - 1)) <= 1e-10 * abs(mean_e)
        assert mean_after_jump(A, stats) == pytest.approx(mean_a, rel=1e-10)
        assert mean_after_jump(E, stats) == pytest.approx(mean_e, rel=1e-10)


class TestMeanAfterJump:
    def test_a_thermal(self):
        assert mean_after_jump(A, photon_statistics(prepare_thermal(1.0))) == pytest.approx(2.0, rel=1e-10)

    def test_e_thermal(self):
        assert mean_after_jump(E, photon_statistics(prepare_thermal(1.0))) == pytest.approx(1.0, rel=1e-10)

    def test_a_squeezed(self):
        rho = prepare_squeezed_vacuum(0.9)
        s = photon_statistics(rho)
        value = mean_after_jump(A, s)
        assert value == pytest.approx(3 * s.mean + 1, abs=1e-9)
        assert value > 2 * s.mean
        assert photon_statistics(apply_jump(A, rho).state).mean == pytest.approx(value, abs=1e-12)

    def test_other_models(self):
        with pytest.raises(ValueError):
            mean_after_jump(H(1.0), photon_statistics(prepare_thermal(1.0)))


class TestBranches:
    def test_double_root(self):
        assert chi0_branches(0.25) == (0.5, 0.5)

    @pytest.mark.parametrize("chi1, upper, lower", [(0.24, 0.6, 0.4), (0.09, 0.9, 0.1)])
    def test_roots(self, chi1, upper, lower):
        hi, lo = chi0_branches(chi1)
        assert hi == pytest.approx(upper, abs=1e-12)
        assert lo == pytest.approx(lower, abs=1e-12)
        assert hi * (1 - hi) == pytest.approx(chi1, abs=1e-14)
        assert lo * (1 - lo) == pytest.approx(chi1, abs=1e-14)

    def test_branch_meaning(self):
        hi, lo = chi0_branches(0.2)
        assert (1 - hi) / hi < 1 < (1 - lo) / lo

    @pytest.mark.parametrize("bad", [0.0, -0.1, 0.2500001])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            chi0_branches(bad)


class TestLimits:
    def test_beta_family_ends(self):
        for nbar in (0.3, 1.0, 3.0):
            chi = prepare_thermal(nbar).chi
            assert np.max(np.abs(predict_distribution(Beta(0), chi) - predict_distribution(A, chi))) <= 1e-13
            assert np.max(np.abs(predict_distribution(Beta(0.5), chi) - predict_distribution(E, chi))) <= 1e-13

    @pytest.mark.parametrize("y", [1e-2, 1e-3])
    def test_small_y_recovers_a(self, y):
        chi = prepare_thermal(1.0).chi
        diff = np.max(np.abs(predict_distribution(H(y), chi)[:20] - predict_distribution(A, chi)[:20]))
        # sin(y sqrt n)^2 = y^2 n (1 - y^2 n / 3 + ...), so the gap is O(y^2)
        assert diff <= 1.0 * y**2

    @pytest.mark.parametrize("state", ["thermal", "coherent"])
    def test_half_ratio(self, state):
        chi0 = 0.999
        if state == "thermal":
            chi = prepare_thermal((1 - chi0) / chi0).chi
        else:
            chi = prepare_coherent(math.sqrt(-math.log(chi0))).chi
        ratio = predict_pn(E, chi, 1) / predict_pn(A, chi, 1)
        assert abs(ratio - 0.5) <= 2e-3


def test_jump_weights():
    n = np.arange(5)
    assert np.allclose(jump_weights(A, n), [0, 1, 2, 3, 4], rtol=1e-15)
    assert np.array_equal(jump_weights(E, n), [0, 1, 1, 1, 1])
    assert np.array_equal(jump_weights(N, n), [0, 1, 4, 9, 16])
