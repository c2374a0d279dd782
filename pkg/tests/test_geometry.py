import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_unitary
from isoholonomic.bounds import isoholonomic_bound
from isoholonomic.errors import InvalidFrame, MeshTooCoarse, NotClosed, NotHermitian
from isoholonomic.evolution import simulate_plan
from isoholonomic.geometry import (
    SampledCurve,
    check_frame,
    check_loop,
    check_projector,
    component_lengths,
    curve_length,
    curve_length_with_error,
    discrete_horizontal_lift,
    eigenbasis_lift,
    generated_curve,
    holonomy,
    horizontality_residual,
    parallel_transport_residual,
    projective_pt_residual,
    projector_from_frame,
    random_closed_loop,
    skewness,
    state_bound_or_zero,
)
from isoholonomic.synthesis import gate_library, plan_gate

PI = np.pi
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def latitude_loop(beta, steps):
    """Qubit state circling the Bloch sphere at polar angle beta."""
    phi = np.linspace(0, 2 * PI, steps + 1)
    psi = np.stack([np.full_like(phi, np.cos(beta / 2)), np.exp(1j * phi) * np.sin(beta / 2)], axis=1)
    return SampledCurve(phi, np.einsum("ti,tj->tij", psi, psi.conj()))


class TestFrames:
    def test_check_frame_accepts(self):
        V = check_frame(np.eye(3, 2))
        assert V.shape == (3, 2)

    @pytest.mark.parametrize("V", [np.eye(2), np.ones((3, 1)), np.array([[1, 1], [0, 1], [0, 0]])])
    def test_check_frame_rejects(self, V):
        with pytest.raises(InvalidFrame):
            check_frame(V)

    def test_projector_from_frame(self):
        V = random_unitary(4, 3)[:, :2]
        P = projector_from_frame(V)
        assert np.allclose(P @ P, P, atol=1e-12)
        assert np.trace(P).real == pytest.approx(2)
        check_projector(P, rank=2)

    def test_check_projector_rejects(self):
        with pytest.raises(ValueError):
            check_projector(np.diag([1.0, 0.5]))


class TestResiduals:
    def test_horizontal_tangent(self):
        V = np.eye(3, 1)
        assert horizontality_residual(V, np.array([[0], [1j], [2]])) == 0

    def test_vertical_tangent(self):
        V = np.eye(3, 1)
        assert horizontality_residual(V, np.array([[0.5j], [0], [0]])) == pytest.approx(0.5)

    def test_pt_residual(self):
        H = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 2]], dtype=complex)
        assert parallel_transport_residual(H, np.eye(3, 2)) == pytest.approx(1)
        assert parallel_transport_residual(H, np.eye(3)[:, [2]]) == pytest.approx(2)

    def test_projective_residual(self):
        res, eps = projective_pt_residual(np.diag([1.0, -1.0, 0.0]), np.eye(3, 2))
        assert (res, eps) == (pytest.approx(1), pytest.approx(0))

    def test_projective_residual_shift(self):
        res, eps = projective_pt_residual(np.diag([2.0, 2.0, 0.0]), np.eye(3, 2))
        assert res == pytest.approx(0)
        assert eps == pytest.approx(2)

    def test_non_hermitian(self):
        with pytest.raises(NotHermitian):
            parallel_transport_residual(np.array([[0, 1], [0, 0]]), np.eye(2, 1))


class TestSkewness:
    def test_pauli_x(self):
        assert skewness(SX, np.diag([1.0, 0.0])) == pytest.approx(1)

    def test_commuting(self):
        assert skewness(SZ, np.diag([1.0, 0.0])) == 0

    @settings(max_examples=50)
    @given(st.integers(0, 10_000))
    def test_matches_trace_formula(self, seed):
        rng = np.random.default_rng(seed)
        H = random_hermitian(rng, 4)
        V = random_unitary(4, seed)[:, :2]
        P = V @ V.conj().T
        C = H @ P - P @ H
        assert skewness(H, P) == pytest.approx(-0.5 * np.trace(C @ C).real, rel=1e-10, abs=1e-12)

    @settings(max_examples=50)
    @given(st.integers(0, 10_000), st.floats(-5, 5))
    def test_shift_invariant(self, seed, c):
        rng = np.random.default_rng(seed)
        H = random_hermitian(rng, 3)
        P = np.diag([1.0, 0.0, 0.0])
        assert skewness(H + c * np.eye(3), P) == pytest.approx(skewness(H, P), rel=1e-9, abs=1e-12)


class TestSampledCurve:
    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            SampledCurve([0, 1], np.stack([np.diag([1.0, 0, 0]), np.diag([1.0, 1, 0])]))

    def test_times_increasing(self):
        P = np.diag([1.0, 0.0])
        with pytest.raises(ValueError):
            SampledCurve([0, 0], np.stack([P, P]))

    def test_subsample_keeps_last(self):
        c = latitude_loop(1.0, 9)
        s = c.subsample(2)
        assert s.times[-1] == c.times[-1]
        assert s.steps == 5


class TestLift:
    def test_constant_curve(self):
        P = np.diag([1.0, 1.0, 0.0]).astype(complex)
        curve = SampledCurve(np.linspace(0, 1, 11), np.repeat(P[None], 11, axis=0))
        hol = holonomy(curve, np.eye(3, 2))
        assert np.allclose(hol.gate_matrix, np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("beta", [0.3, 1.0, PI / 2, 2.5])
    def test_solid_angle(self, beta):
        # geometric phase is minus half the enclosed solid angle
        G = holonomy(latitude_loop(beta, 4000), np.array([np.cos(beta / 2), np.sin(beta / 2)])).gate_matrix
        expected = -PI * (1 - np.cos(beta))
        assert abs(G[0, 0]) == pytest.approx(1, abs=1e-12)
        assert np.angle(G[0, 0] * np.exp(-1j * expected)) == pytest.approx(0, abs=1e-5)

    def test_lune_by_real_legs(self):
        # two great-circle legs through the poles; the lune has solid angle 2 alpha
        alpha, N = 0.9, 4000
        s = np.linspace(0, PI, N + 1)
        up = np.stack([np.cos(s / 2), np.sin(s / 2) + 0j], axis=1)
        down = np.stack([np.cos(s[::-1] / 2), np.exp(1j * alpha) * np.sin(s[::-1] / 2)], axis=1)
        psi = np.concatenate([up, down[1:]])
        curve = SampledCurve(np.arange(len(psi), dtype=float), np.einsum("ti,tj->tij", psi, psi.conj()))
        G = holonomy(curve, np.array([1.0, 0.0])).gate_matrix
        assert np.mod(np.angle(G[0, 0]), 2 * PI) == pytest.approx(np.mod(-alpha, 2 * PI), abs=1e-9)

    def test_second_order_against_exact_frames(self):
        p = plan_gate(gate_library("t_gate"))
        errs = []
        for steps in (200, 400, 800):
            traj = simulate_plan(p, steps)
            frames = discrete_horizontal_lift(traj.curve, traj.frames[0])
            errs.append(np.max(np.abs(frames - traj.frames)))
        assert errs[0] / errs[1] == pytest.approx(4, abs=0.3)
        assert errs[1] / errs[2] == pytest.approx(4, abs=0.3)

    @pytest.mark.parametrize("seed", range(4))
    def test_basis_covariance(self, seed):
        curve = random_closed_loop(5, 2, seed=seed, steps=1000)
        V0 = np.eye(5, 2, dtype=complex)
        W = random_unitary(2, 100 + seed)
        G = holonomy(curve, V0).gate_matrix
        G_W = holonomy(curve, V0 @ W).gate_matrix
        assert np.max(np.abs(G_W - W.conj().T @ G @ W)) < 1e-8

    def test_reversal_inverts(self):
        curve = random_closed_loop(4, 2, seed=5, steps=1000)
        back = SampledCurve(curve.times, curve.projectors[::-1])
        V0 = np.eye(4, 2, dtype=complex)
        G = holonomy(curve, V0).gate_matrix
        G_back = holonomy(back, V0).gate_matrix
        assert np.max(np.abs(G_back @ G - np.eye(2))) < 1e-12

    def test_wrong_start(self):
        with pytest.raises(InvalidFrame):
            discrete_horizontal_lift(latitude_loop(1.0, 100), np.array([0.0, 1.0]))

    def test_coarse_mesh(self):
        with pytest.raises(MeshTooCoarse):
            discrete_horizontal_lift(latitude_loop(PI / 2, 4), np.array([1, 1]) / np.sqrt(2))

    def test_open_curve(self):
        phi = np.linspace(0, PI, 101)
        psi = np.stack([np.cos(phi / 2), np.sin(phi / 2) + 0j], axis=1)
        curve = SampledCurve(phi, np.einsum("ti,tj->tij", psi, psi.conj()))
        with pytest.raises(NotClosed):
            holonomy(curve, np.array([1.0, 0.0]))


class TestLength:
    def test_great_circle(self):
        # equator of the Bloch sphere: Fubini-Study length pi
        assert curve_length(latitude_loop(PI / 2, 2000)) == pytest.approx(PI, abs=1e-5)

    def test_latitude(self):
        beta = 0.7
        assert curve_length(latitude_loop(beta, 2000)) == pytest.approx(PI * np.sin(beta), abs=1e-5)

    def test_error_estimate_shrinks(self):
        _, e1 = curve_length_with_error(latitude_loop(1.0, 200))
        _, e2 = curve_length_with_error(latitude_loop(1.0, 400))
        assert e1 / e2 == pytest.approx(4, abs=0.3)

    @pytest.mark.parametrize("name,expected", [("t_gate", PI * np.sqrt(7) / 4), ("cnot", PI)])
    def test_tight_plans(self, name, expected):
        traj = simulate_plan(plan_gate(gate_library(name)), 10_000)
        assert curve_length(traj.curve) == pytest.approx(expected, abs=1e-6)


class TestGeneratedCurve:
    def test_zero_schedule(self):
        curve = generated_curve(lambda t: np.zeros((3, 3)), np.eye(3, 1), 1.0, 10)
        assert curve_length(curve) == 0
        assert curve.closure_residual == 0

    def test_constant_rotation(self):
        # exp(-i t pi sx) closes at t = 1 after a full great circle (length pi)
        curve = generated_curve(lambda t: PI / 2 * SX, np.eye(2, 1), 2.0, 2000)
        assert curve.closure_residual < 1e-12
        assert curve_length(curve) == pytest.approx(PI, abs=1e-5)

    def test_vectorized_agrees(self):
        H = random_hermitian(np.random.default_rng(0), 3)
        sched = lambda t: np.cos(t) * H
        a = generated_curve(sched, np.eye(3, 1), 1.0, 50)
        b = generated_curve(lambda ts: np.cos(ts)[:, None, None] * H, np.eye(3, 1), 1.0, 50, vectorized=True)
        assert np.allclose(a.projectors, b.projectors, atol=1e-14)


class TestRandomLoops:
    @pytest.mark.parametrize("dim,rank,gens", [(4, 2, 3), (5, 1, 2), (6, 3, 4), (3, 1, 1)])
    def test_closed(self, dim, rank, gens):
        curve = random_closed_loop(dim, rank, gens, seed=7, steps=500)
        assert curve.closure_residual <= 1e-12
        assert curve.rank == rank

    def test_seeded(self):
        a = random_closed_loop(4, 2, seed=3, steps=100)
        b = random_closed_loop(4, 2, seed=3, steps=100)
        assert np.array_equal(a.projectors, b.projectors)

    @pytest.mark.parametrize("seed", range(3))
    def test_retraced_loop_trivial(self, seed):
        curve = random_closed_loop(4, 2, generator_count=1, seed=seed, steps=2000)
        chk = check_loop(curve)
        assert chk.bound < 1e-6
        assert chk.margin > 0

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            random_closed_loop(3, 3)


class TestInequalities:
    @pytest.mark.parametrize("seed", range(10))
    def test_loop_not_below_bound(self, seed):
        chk = check_loop(random_closed_loop(4, 2, seed=seed, steps=2000))
        assert not chk.violated

    @pytest.mark.parametrize("seed", range(10))
    def test_state_inequality(self, seed):
        curve = random_closed_loop(3, 1, seed=seed, steps=2000)
        frames, phases = eigenbasis_lift(curve)
        length, err = curve_length_with_error(curve)
        assert length >= state_bound_or_zero(phases[0]) - 5 * err

    @pytest.mark.parametrize("seed", range(6))
    def test_decomposition(self, seed):
        # horizontal frames split the squared speed into the speeds of their columns
        curve = random_closed_loop(5, 2, seed=seed, steps=2000)
        frames, phases = eigenbasis_lift(curve)
        comp = component_lengths(frames, curve.times)
        length, err = curve_length_with_error(curve)
        tol = 5 * err + 1e-9
        assert length >= np.sqrt(np.sum(comp**2)) - tol
        for L_k, th in zip(comp, phases):
            assert L_k >= state_bound_or_zero(th) - tol
        assert np.sqrt(np.sum(comp**2)) >= isoholonomic_bound(phases) - tol

    def test_eigenbasis_columns_close(self):
        curve = random_closed_loop(4, 2, seed=1, steps=2000)
        frames, phases = eigenbasis_lift(curve)
        ratio = np.einsum("ik,ik->k", frames[0].conj(), frames[-1])
        assert np.allclose(ratio, np.exp(1j * phases), atol=1e-9)
