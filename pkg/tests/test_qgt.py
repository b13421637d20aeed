import numpy as np
import pytest

from twistube import (
    DegeneracyError,
    berry_loop,
    mixing_angle,
    qgt_analytic,
    qgt_fd_oracle,
)

N1, N2, D = 1, 2, 1.0
DELTA_E = (4 - 1) * np.pi**2 / 2


class TestMixingAngle:
    def test_identity_on_grid(self):
        # cos^2 + sin^2 == 1 for the printed angle definitions
        for f in np.linspace(0.05, 1.0, 12):
            for ap in np.linspace(-0.8, -0.05, 12):
                phi, lam = mixing_angle(f, ap, DELTA_E)
                x = 2 * f * DELTA_E
                c = x / np.sqrt(2 * lam * (lam - ap))
                s = (lam - ap) / np.sqrt(2 * lam * (lam - ap))
                assert c**2 + s**2 == pytest.approx(1.0, abs=1e-12)
                assert np.cos(phi) == pytest.approx(c, abs=1e-12)

    def test_double_angle_identities(self):
        phi, lam = mixing_angle(0.3, -0.2, DELTA_E)
        x = 2 * 0.3 * DELTA_E
        assert np.cos(2 * phi) == pytest.approx(-0.2 / lam, abs=1e-12)
        assert np.sin(2 * phi) == pytest.approx(x / lam, abs=1e-12)

    def test_degeneracy_rejected(self):
        with pytest.raises(DegeneracyError):
            mixing_angle(0.0, 0.0, DELTA_E)
        with pytest.raises(DegeneracyError):
            mixing_angle(0.0, 0.5, DELTA_E)  # lam == alpha p exactly


class TestClosedForm:
    def test_curvature_vanishes_without_drive(self):
        pt = qgt_analytic(0.05, 0.4, 10.0, 0.0, N1, N2, D)
        assert pt.F[0, 1] == 0.0

    def test_metric_matches_eigenvector_oracle(self):
        for om, f in ((0.05, 0.4), (0.02, 0.15), (0.08, 0.9)):
            pt = qgt_analytic(om, f, 10.0, 0.0, N1, N2, D, tau=0.02)
            g_fd = qgt_fd_oracle(om, f, 10.0, N1, N2, D, tau=0.02)
            assert np.max(np.abs(pt.g - g_fd)) < 1e-6 * max(np.max(np.abs(g_fd)),
                                                            1.0)

    def test_metric_symmetric_psd(self):
        pt = qgt_analytic(0.05, 0.4, 10.0, 0.3, N1, N2, D)
        assert pt.g[0, 1] == pt.g[1, 0]
        assert np.all(np.linalg.eigvalsh(pt.g) > -1e-14)

    def test_ff_component_closed_form(self):
        om, f, p = 0.05, 0.4, 10.0
        pt = qgt_analytic(om, f, p, 0.0, N1, N2, D)
        c2 = np.cos(2 * pt.phi)
        assert pt.g[1, 1] == pytest.approx(DELTA_E**2 * c2**2 / pt.lam**2,
                                           rel=1e-12)

    def test_curvature_antisymmetric(self):
        pt = qgt_analytic(0.05, 0.4, 10.0, 0.2, N1, N2, D)
        assert pt.F[0, 1] == -pt.F[1, 0]

    def test_divergence_guard(self):
        with pytest.raises(DegeneracyError):
            qgt_analytic(0.0, 0.0, 10.0, 0.1, N1, N2, D, tau=0.0)


class TestBerryLoop:
    def test_stokes_consistency_rectangle(self):
        loop = [(0.01, 0.1), (0.05, 0.1), (0.05, 0.5), (0.01, 0.5)]
        area, line = berry_loop(loop, 10.0, lambda om, f: 0.02, N1, N2, D,
                                tau=0.02)
        assert line == pytest.approx(area, rel=1e-6)

    def test_orientation_flips_sign(self):
        loop = [(0.01, 0.1), (0.05, 0.1), (0.05, 0.5), (0.01, 0.5)]
        area_ccw, _ = berry_loop(loop, 10.0, lambda om, f: 0.02, N1, N2, D,
                                 tau=0.02)
        area_cw, _ = berry_loop(loop[::-1], 10.0, lambda om, f: 0.02, N1, N2,
                                D, tau=0.02)
        assert area_cw == pytest.approx(-area_ccw, rel=1e-10)

    def test_zero_drive_gives_zero_flux(self):
        loop = [(0.01, 0.1), (0.05, 0.1), (0.05, 0.5)]
        area, line = berry_loop(loop, 10.0, lambda om, f: 0.0, N1, N2, D)
        assert area == pytest.approx(0.0, abs=1e-15)
        assert line == pytest.approx(0.0, abs=1e-15)
