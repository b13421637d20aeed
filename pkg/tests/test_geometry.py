import numpy as np
import pytest

from twistube import (
    CoordinateBreakdownError,
    FrameUndefinedError,
    HelixCurve,
    SingularTransformError,
    TabulatedCurve,
    TransformProfile,
    embed_point,
    frenet_frame,
    metric_tensor,
    metric_tensor_fd,
)


def helix():
    return HelixCurve(3.0, 1.0, length=50.0)


def combined_profile(s0=50.0, delta=0.02, omega=0.02):
    k = 2.0 * np.pi / s0
    return TransformProfile.combined(
        lambda s: omega * s, lambda s: np.sin(k * s), delta,
        theta_dot=lambda s: omega, f_dot=lambda s: k * np.cos(k * s))


class TestFrames:
    def test_helix_curvature_torsion_closed_form(self):
        r, b = 3.0, 1.0
        c = HelixCurve(r, b)
        assert c.kappa(5.0) == pytest.approx(r / (r**2 + b**2), rel=1e-14)
        assert c.tau(5.0) == pytest.approx(b / (r**2 + b**2), rel=1e-14)

    @pytest.mark.parametrize("s", [0.0, 7.3, 25.0, 49.9])
    def test_helix_frame_orthonormal_right_handed(self, s):
        fr = helix().frame(s)
        m = fr.as_matrix()
        assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)

    def test_frenet_equations_hold_on_helix(self):
        c = helix()
        s, h = 11.0, 1e-6
        dt = (c.frame(s + h).t - c.frame(s - h).t) / (2 * h)
        dn = (c.frame(s + h).n - c.frame(s - h).n) / (2 * h)
        fr = c.frame(s)
        assert np.allclose(dt, c.kappa(s) * fr.n, atol=1e-8)
        assert np.allclose(dn, -c.kappa(s) * fr.t + c.tau(s) * fr.b, atol=1e-8)

    def test_tabulated_matches_helix_frames_and_points(self):
        c = helix()
        sg = np.linspace(0.0, 50.0, 5001)
        tab = TabulatedCurve(sg, np.full_like(sg, c.kappa(0.0)),
                             np.full_like(sg, c.tau(0.0)),
                             initial_frame=c.frame(0.0).as_matrix(),
                             initial_point=c.point(0.0))
        for s in (7.3, 25.0, 49.5):
            assert np.allclose(tab.frame(s).as_matrix(),
                               c.frame(s).as_matrix(), atol=1e-9)
            assert np.allclose(tab.point(s), c.point(s), atol=1e-9)

    def test_frame_undefined_on_straight_segment(self):
        sg = np.linspace(0.0, 10.0, 101)
        tab = TabulatedCurve(sg, np.zeros_like(sg), np.zeros_like(sg))
        with pytest.raises(FrameUndefinedError):
            frenet_frame(tab, 5.0)


class TestTransformProfile:
    def test_pure_rotation_is_orthogonal(self):
        p = TransformProfile.rotation(lambda s: 0.3 * s,
                                      theta_dot=lambda s: 0.3)
        m = p.matrix(2.0)
        assert np.allclose(m @ m.T, np.eye(2), atol=1e-14)
        assert p.is_pure_rotation()

    def test_omega_is_theta_rate(self):
        p = TransformProfile.rotation(lambda s: 0.05 * s**2,
                                      theta_dot=lambda s: 0.1 * s)
        assert p.omega(3.0) == pytest.approx(0.3, rel=1e-12)

    def test_matrix_derivative_analytic_matches_fd(self):
        p = combined_profile()
        s = 4.2
        h = 1e-6
        fd = (p.matrix(s + h) - p.matrix(s - h)) / (2 * h)
        assert np.allclose(p.matrix_derivative(s), fd, atol=1e-7)

    def test_singular_transform_rejected(self):
        p = TransformProfile.scaling(-1.0, 0.0, 1.0)  # 1 + delta*f1 = 0
        with pytest.raises(SingularTransformError):
            metric_tensor(helix(), p, 1.0, (0.1, 0.1))

    def test_slow_variation_ratio_warns_when_fast(self):
        p = TransformProfile.combined(
            lambda s: 0.0, lambda s: np.sin(40.0 * s), 0.1,
            theta_dot=lambda s: 0.0, f_dot=lambda s: 40.0 * np.cos(40.0 * s))
        with pytest.warns(UserWarning):
            p.slow_variation_ratio(np.linspace(0, 1, 11), 0.5)


class TestMetric:
    def test_closed_form_matches_fd_oracle(self):
        c = helix()
        p = combined_profile()
        rng = np.random.default_rng(7)
        for _ in range(25):
            s = rng.uniform(0.0, 50.0)
            q = rng.uniform(-0.45, 0.45, size=2)
            ev = metric_tensor(c, p, s, q)
            fd = metric_tensor_fd(c, p, s, q)
            scale = np.max(np.abs(fd))
            assert np.max(np.abs(ev.G - fd)) < 1e-6 * scale

    def test_det_closed_form(self):
        ev = metric_tensor(helix(), combined_profile(), 13.0, (0.2, -0.3))
        assert ev.det_closed == pytest.approx(np.linalg.det(ev.G), rel=1e-12)

    def test_inverse_blocks(self):
        ev = metric_tensor(helix(), combined_profile(), 31.0, (-0.4, 0.1))
        assert np.max(np.abs(ev.G @ ev.Ginv - np.eye(3))) < 1e-10

    def test_gauge_reduces_to_torsion_term_for_identity_transform(self):
        c = helix()
        p = TransformProfile.rotation(lambda s: 0.0, theta_dot=lambda s: 0.0)
        q = (0.25, -0.4)
        ev = metric_tensor(c, p, 2.0, q)
        tau = c.tau(2.0)
        assert np.allclose(ev.gauge, [tau * q[1], -tau * q[0]], atol=1e-12)

    def test_coordinate_breakdown_when_gamma_nonpositive(self):
        # kappa = 0.3, so q1 = 4 puts gamma = 1 - kappa*v1 < 0
        with pytest.raises(CoordinateBreakdownError):
            metric_tensor(helix(), combined_profile(), 1.0, (4.0, 0.0))

    def test_embed_point_lives_on_cross_section_plane(self):
        c = helix()
        p = TransformProfile.rotation(lambda s: 0.1 * s,
                                      theta_dot=lambda s: 0.1)
        s = 6.0
        r = embed_point(c, p, (0.2, 0.1), s)
        fr = c.frame(s)
        # displacement from the spine is purely transverse
        assert abs((r - c.point(s)) @ fr.t) < 1e-12
