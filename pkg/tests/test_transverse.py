import numpy as np
import pytest

from twistube import (
    angular_expectation,
    angular_expectation_quadrature,
    bessel_j,
    bessel_zero,
    box_energy,
    circular_mode,
    square_mode,
)


class TestBoxModes:
    def test_box_energy_ground_state(self):
        assert box_energy(1.0, 1) == pytest.approx(np.pi**2 / 2, rel=1e-14)

    def test_box_energy_scaling_with_side(self):
        assert box_energy(2.0, 3) == pytest.approx(box_energy(1.0, 3) / 4,
                                                   rel=1e-14)

    def test_square_mode_energy_is_sum(self):
        m = square_mode(1.0, 1, 2)
        assert m.energy == pytest.approx(box_energy(1.0, 1) + box_energy(1.0, 2),
                                         rel=1e-14)


class TestAngularExpectation:
    def test_reference_value_12(self):
        assert angular_expectation(1, 2) == pytest.approx(
            256.0 / (-27.0 * np.pi**2), rel=1e-13)

    @pytest.mark.parametrize("n1,n2", [(1, 2), (1, 4), (2, 3), (2, 5), (3, 4),
                                       (4, 5)])
    def test_closed_form_matches_quadrature_odd_pairs(self, n1, n2):
        closed = angular_expectation(n1, n2)
        quad = angular_expectation_quadrature(n1, n2, grid=256)
        assert quad == pytest.approx(closed, abs=1e-6)

    @pytest.mark.parametrize("n1,n2", [(1, 3), (2, 4), (1, 5), (3, 5)])
    def test_even_sum_pairs_vanish(self, n1, n2):
        assert abs(angular_expectation(n1, n2)) < 1e-10
        assert abs(angular_expectation_quadrature(n1, n2, grid=256)) < 1e-6

    def test_antisymmetric_under_swap(self):
        assert angular_expectation(2, 3) == -angular_expectation(3, 2)


class TestBessel:
    def test_bessel_j_against_scipy(self):
        from scipy.special import jv
        for order in (0, 1, 2, 5):
            for x in (0.5, 2.404, 7.7, 21.3):
                assert bessel_j(order, x) == pytest.approx(jv(order, x),
                                                           abs=1e-10)

    def test_zeros_against_scipy(self):
        from scipy.special import jn_zeros
        for l in (0, 1, 2, 3):
            ref = jn_zeros(l, 4)
            for n in range(1, 5):
                assert bessel_zero(l, n) == pytest.approx(ref[n - 1], abs=1e-9)

    def test_zero_cache_is_consistent(self):
        a = bessel_zero(2, 3)
        b = bessel_zero(2, 3)
        assert a == b

    def test_negative_order_symmetric(self):
        assert bessel_zero(-1, 2) == bessel_zero(1, 2)


class TestCircularModes:
    def test_energy_from_bessel_zero(self):
        m = circular_mode(1.0, 1, 0)
        assert m.energy == pytest.approx(2.404825557695773**2 / 2.0, rel=1e-9)

    def test_l_expectation_is_quantum_number(self):
        assert circular_mode(1.0, 1, 3).l_exp == 3

    def test_energy_scales_inverse_square_radius(self):
        assert circular_mode(2.0, 1, 1).energy == pytest.approx(
            circular_mode(1.0, 1, 1).energy / 4.0, rel=1e-12)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            circular_mode(0.0, 1, 0)
