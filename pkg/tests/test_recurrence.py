"""Step kernels, parameter guards, scaled-sequence arithmetic, exact oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmspec.errors import ConfigError
from filmspec.recurrence import (
    RESCALE_B,
    Exponents,
    Params,
    ScaledSequence,
    backward_step,
    forward_step,
    shooting_residual,
)

from oracles import backward_chain_exact, forward_chain_exact, rel_err_exact

BENIGN_COMBOS = [
    (0.1, 0.0),
    (0.1, 1.5),
    (1.0, 0.0),
    (1.0, 1.5),
    (1.0, 14.95),
    (1.9, 0.0),
    (1.9, 1.5),
    (1.9, 14.95),
]


def _forward_float(eps, lam, n_top):
    p = Params(eps, lam)
    vals = {1: 1.0, 2: 10.0}
    for n in range(2, n_top):
        vals[n + 1] = forward_step(p, n, vals[n - 1], vals[n])
    return vals


def _backward_float(eps, lam, n_top):
    p = Params(eps, lam)
    vals = {n_top: 1.0, n_top + 1: 0.5}
    for n in range(n_top - 1, 0, -1):
        vals[n] = backward_step(p, n, vals[n + 1], vals[n + 2])
    return vals


class TestParams:
    def test_interval_guard(self):
        for eps in (0.0, 2.0, 2.5, -1.0):
            with pytest.raises(ConfigError):
                Params(eps)

    def test_interior_ok(self):
        assert Params(0.1).epsilon == 0.1
        assert Params(1.999, 3.0).lambda_ == 3.0

    def test_negative_lambda_rejected(self):
        with pytest.raises(ConfigError):
            Params(0.1, -0.5)

    def test_supercritical_flag(self):
        assert Params(4.0, 0.5, allow_supercritical=True).epsilon == 4.0
        with pytest.raises(ConfigError):
            Params(-1.0, allow_supercritical=True)


class TestExponents:
    def test_reference_values(self):
        ex = Exponents.from_params(Params(0.1, 1.0))
        assert ex.a == pytest.approx(9.0)
        assert ex.c == pytest.approx(11.0)
        assert ex.h == pytest.approx(11.0)
        assert ex.k == ex.h

    @given(
        eps=st.floats(0.01, 1.99),
        lam=st.floats(0.0, 100.0),
    )
    def test_gap_is_two(self, eps, lam):
        ex = Exponents.from_params(Params(eps, lam))
        assert ex.c - ex.a == pytest.approx(2.0)


class TestSteps:
    def test_forward_example(self):
        # 2*1*1 + (2*2/0.1)*10, over 2*3
        p = Params(0.1, 0.0)
        assert forward_step(p, 2, 1.0, 10.0) == pytest.approx(67.0, rel=1e-14)

    def test_forward_chain_examples(self):
        vals = _forward_float(0.1, 0.0, 5)
        assert vals[4] == pytest.approx(340.0, rel=1e-14)
        assert vals[5] == pytest.approx(1400.2, rel=1e-14)

    def test_forward_needs_n_at_least_two(self):
        with pytest.raises(ConfigError):
            forward_step(Params(0.1), 1, 1.0, 1.0)

    def test_backward_example(self):
        # 3*w3 + (4/0.2)*w2 with w2=1, w3=0.5
        p = Params(0.1, 0.0)
        assert backward_step(p, 1, 1.0, 0.5) == pytest.approx(21.5, rel=1e-12)

    def test_backward_needs_n_at_least_one(self):
        with pytest.raises(ConfigError):
            backward_step(Params(0.1), 0, 1.0, 1.0)

    @given(
        eps=st.floats(0.05, 1.95),
        lam=st.floats(0.0, 30.0),
        n=st.integers(1, 500),
        w1=st.floats(1e-3, 1e3),
        w2=st.floats(1e-3, 1e3),
    )
    @settings(max_examples=200)
    def test_backward_then_forward_round_trip(self, eps, lam, n, w1, w2):
        # The backward step at row n and the forward step at row n+1 are
        # two routes through the same three-term relation.
        p = Params(eps, lam)
        w0 = backward_step(p, n, w1, w2)
        v0, v1, v2 = (
            (-1.0) ** n * w0,
            (-1.0) ** (n + 1) * w1,
            (-1.0) ** (n + 2) * w2,
        )
        got = forward_step(p, n + 1, v0, v1)
        scale = max(abs(v2), abs(v1), abs(v0), 1e-30)
        assert abs(got - v2) <= 1e-9 * scale

    def test_shooting_residual_exact_zero(self):
        p = Params(0.1, 0.5)
        v1 = 2.0
        v2 = (1.0 - p.lambda_) * v1 / p.epsilon
        assert shooting_residual(p, v1, v2) == 0.0

    def test_shooting_residual_drops_v1_at_lambda_one(self):
        p = Params(0.1, 1.0)
        assert shooting_residual(p, 123.0, 7.0) == pytest.approx(0.7)


class TestScaledSequence:
    def test_first_index_guard(self):
        with pytest.raises(ConfigError):
            ScaledSequence(0, [1.0])

    def test_value_and_indexing(self):
        s = ScaledSequence(3, [2.0, 4.0, 8.0])
        assert s.first_index == 3
        assert s.last_index == 5
        assert len(s) == 3
        assert s.value(4) == pytest.approx(4.0, rel=1e-12)

    def test_rescale_window(self):
        s = ScaledSequence(1, [1e-200, 3e-220])
        top = float(np.max(np.abs(s.mantissas)))
        assert 1.0 <= top <= RESCALE_B

    def test_ratios_survive_rescale_exactly(self):
        s = ScaledSequence(1, [3e-180, 7e-180, -5e-181])
        m = s.mantissas
        assert m[1] / m[0] == 7e-180 / 3e-180
        assert m[2] / m[0] == -5e-181 / 3e-180

    def test_log_abs(self):
        s = ScaledSequence(1, [1e-100, 0.0])
        assert s.log_abs(1) == pytest.approx(math.log(1e-100), rel=1e-12)
        assert s.log_abs(2) == -math.inf

    def test_zero_sequence(self):
        s = ScaledSequence(1, [0.0, 0.0])
        assert s.log_scale == 0.0
        assert np.all(s.resolve() == 0.0)

    @given(
        vals=st.lists(
            st.floats(1e-90, 1e90).map(lambda x: x - 5e89), min_size=1, max_size=20
        )
    )
    @settings(max_examples=100)
    def test_resolve_round_trip(self, vals):
        s = ScaledSequence(1, vals)
        got = s.resolve()
        for g, v in zip(got, vals):
            assert g == pytest.approx(v, rel=1e-12, abs=1e-300)


class TestExactOracle:
    @pytest.mark.parametrize("eps,lam", BENIGN_COMBOS)
    def test_forward_matches_rational_oracle(self, eps, lam):
        have = _forward_float(eps, lam, 100)
        want = forward_chain_exact(eps, lam, 1.0, 10.0, 100)
        worst = max(rel_err_exact(have[n], want[n]) for n in have)
        assert worst <= 1e-12

    @pytest.mark.parametrize("eps,lam", BENIGN_COMBOS)
    def test_backward_matches_rational_oracle(self, eps, lam):
        have = _backward_float(eps, lam, 100)
        want = backward_chain_exact(eps, lam, 1.0, 0.5, 100)
        worst = max(rel_err_exact(have[n], want[n]) for n in have)
        assert worst <= 1e-12

    @pytest.mark.xfail(
        strict=True,
        reason="subtractive cancellation below the turning point amplifies "
        "rounding by ~2e7 at eps=0.1, lam=14.95; binary64 floor is ~3e-8",
    )
    def test_forward_oracle_hard_combo(self):
        have = _forward_float(0.1, 14.95, 100)
        want = forward_chain_exact(0.1, 14.95, 1.0, 10.0, 100)
        worst = max(rel_err_exact(have[n], want[n]) for n in have)
        assert worst <= 1e-12

    def test_hard_combo_floor_is_bounded(self):
        # Regression pin: the cancellation belt costs ~7 digits, not more.
        have = _forward_float(0.1, 14.95, 100)
        want = forward_chain_exact(0.1, 14.95, 1.0, 10.0, 100)
        worst = max(rel_err_exact(have[n], want[n]) for n in have)
        assert 1e-12 < worst <= 1e-6
