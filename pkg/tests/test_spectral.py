"""Eigenvector construction, projection norms, theta-space synthesis."""

from __future__ import annotations

import math

import numpy as np
import pytest

from filmspec.eigensolver import EigenvalueRecord
from filmspec.errors import ConfigError, OverlapError, ResidualError
from filmspec.recurrence import ScaledSequence
from filmspec.spectral import (
    Eigenvector,
    apply_adjoint,
    apply_operator,
    build_eigenvector,
    default_n_max,
    projection_norm,
    synthesize_theta_samples,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _fake_record(lam, bracket=None, M=4000):
    return EigenvalueRecord(
        index=1,
        lambda_=lam,
        bracket=bracket or (lam, lam),
        residual_sign_gap=0.0,
        M=M,
    )


class TestGuards:
    def test_window_must_fit_under_m(self, spectrum01):
        with pytest.raises(ConfigError):
            build_eigenvector(0.1, spectrum01[0], n_max=4000)

    def test_m_must_cover_turning_point(self):
        with pytest.raises(ConfigError):
            build_eigenvector(0.1, _fake_record(3000.0))

    def test_non_root_rejected(self):
        with pytest.raises(ResidualError, match="residual"):
            build_eigenvector(0.1, _fake_record(7.0, bracket=(6.9, 7.1)))

    def test_default_window(self):
        assert default_n_max(0.1) == 400
        assert default_n_max(1.0) > 400


class TestInvariants:
    def test_unit_norm(self, vectors01):
        for v in vectors01:
            assert np.linalg.norm(v.values()) == pytest.approx(1.0, abs=1e-12)

    def test_interior_recurrence(self, vectors01):
        # Recomputed here from scratch, not via the module's own checker.
        for v in vectors01:
            x = v.values()
            n = np.arange(2, len(x), dtype=np.float64)
            t_prev = n * (n - 1.0) * x[:-2]
            t_next = n * (n + 1.0) * x[2:]
            t_diag = (2.0 * (n - v.lambda_) / 0.1) * x[1:-1]
            resid = np.abs(t_prev - t_next + t_diag)
            scale = np.maximum(
                np.abs(t_prev), np.maximum(np.abs(t_next), np.abs(t_diag))
            )
            scale = np.maximum(scale, np.finfo(float).tiny)
            assert float(np.max(resid / scale)) <= 1e-8, f"row {v.index}"

    def test_boundary_row(self, vectors01):
        for v in vectors01:
            x = v.values()
            shoot = abs(0.1 * x[1] - (1.0 - v.lambda_) * x[0])
            assert shoot <= 1e-6 * max(abs(x[0]), abs(x[1])), f"row {v.index}"

    def test_tail_alternates(self, vectors01):
        for v in vectors01:
            x = v.values()
            start = math.ceil(2.0 * v.lambda_) + 1
            prods = x[start - 1 : -1] * x[start:]
            assert np.all(prods < 0.0), f"row {v.index}"

    def test_peak_location(self, vectors01):
        assert vectors01[0].peak_index <= 3
        assert 13 <= vectors01[9].peak_index <= 17

    def test_tail_envelope(self, vectors01):
        # |v_n| n^c flattens under its running max with the 1 - h/n defect.
        v = vectors01[9]
        n = np.arange(200, 401, dtype=np.float64)
        t = np.abs(v.values()[199:400]) * n**11.0
        top = float(np.max(t))
        assert np.all(t <= top * (1.0 + 1e-12))
        h = 1.0 + v.lambda_ / 0.1
        assert np.all(t >= top * (1.0 - h / n) * (1.0 - 1e-6))

    def test_narrow_window_build(self, spectrum01):
        v = build_eigenvector(0.1, spectrum01[0], n_max=200)
        assert v.n_max == 200
        assert np.linalg.norm(v.values()) == pytest.approx(1.0, abs=1e-12)


class TestOperatorAction:
    def test_apply_operator_shape(self):
        assert len(apply_operator(0.1, np.ones(10))) == 9

    def test_eigen_relation(self, vectors01):
        for v in (vectors01[0], vectors01[4], vectors01[9]):
            x = v.values()
            ax = apply_operator(0.1, x)
            resid = np.linalg.norm(ax - v.lambda_ * x[:-1])
            assert resid <= 1e-6 * v.lambda_, f"row {v.index}"

    def test_adjoint_relation(self, vectors01):
        # D v is an eigenvector of the transpose at the same eigenvalue.
        for v in (vectors01[0], vectors01[4], vectors01[9]):
            x = v.values()
            signs = np.where(np.arange(1, len(x) + 1) % 2 == 0, 1.0, -1.0)
            y = signs * x
            ay = apply_adjoint(0.1, y)
            resid = np.linalg.norm(ay - v.lambda_ * y[:-1])
            assert resid <= 1e-6 * v.lambda_, f"row {v.index}"


class TestProjectionNorm:
    def test_reciprocal_overlap(self, vectors01):
        for v in vectors01:
            rep = projection_norm(v)
            assert rep.proj_norm == 1.0 / abs(rep.overlap)
            assert rep.index == v.index
            assert rep.lambda_ == v.lambda_

    def test_at_least_one(self, vectors01):
        # |<v, Dv>| <= 1 for unit v, so the norm is >= 1.
        for v in vectors01:
            assert projection_norm(v).proj_norm >= 1.0

    def test_growth_along_spectrum(self, vectors01):
        norms = [projection_norm(v).proj_norm for v in vectors01]
        assert all(b > a for a, b in zip(norms, norms[1:]))
        assert norms[-1] > 1e4

    def test_vanishing_overlap_raises(self):
        half = math.sqrt(0.5)
        v = Eigenvector(
            index=1,
            lambda_=2.0,
            entries=ScaledSequence(1, [half, half]),
            peak_index=1,
        )
        with pytest.raises(OverlapError):
            projection_norm(v)


class TestThetaSynthesis:
    def test_grid_guard(self, vectors01):
        with pytest.raises(ConfigError):
            synthesize_theta_samples(vectors01[0], 1)

    def test_single_coefficient_exact(self):
        e1 = Eigenvector(
            index=1, lambda_=1.0, entries=ScaledSequence(1, [1.0]), peak_index=1
        )
        for theta, f in synthesize_theta_samples(e1, 4):
            want = complex(math.cos(theta), math.sin(theta)) / SQRT_2PI
            assert abs(f - want) <= 1e-15

    def test_grid_nodes(self, vectors01):
        samples = synthesize_theta_samples(vectors01[0], 8)
        thetas = [t for t, _ in samples]
        want = [-math.pi + 2.0 * math.pi * j / 8 for j in range(8)]
        assert thetas == pytest.approx(want, abs=1e-15)

    def test_parseval(self, vectors01):
        v = vectors01[0]
        samples = synthesize_theta_samples(v, 512)
        total = sum(abs(f) ** 2 for _, f in samples) * (2.0 * math.pi / 512)
        assert total == pytest.approx(float(np.sum(v.values() ** 2)), rel=1e-6)

    def test_conjugate_symmetry(self, vectors01):
        # Real coefficients: F(-theta) = conj(F(theta)).
        samples = dict(synthesize_theta_samples(vectors01[0], 8))
        for theta, f in samples.items():
            mirror = -theta
            if mirror in samples:
                assert abs(samples[mirror] - f.conjugate()) <= 1e-14

    def test_peak_at_edge(self, vectors01):
        samples = synthesize_theta_samples(vectors01[0], 64)
        best = max(samples, key=lambda tf: abs(tf[1]))
        assert best[0] == pytest.approx(-math.pi)

    def test_high_row_concentrates_at_edge(self, vectors01):
        # The grid starts at -pi, which is pi wrapped around the circle.
        samples = synthesize_theta_samples(vectors01[9], 512)
        best = max(samples, key=lambda tf: abs(tf[1]))
        assert best[0] == pytest.approx(-math.pi)
