import math

import numpy as np
import pytest

from rotor_ratchet.bessel import bessel_j_row, kick_kernel


def bessel_series(order, x, terms=60):
    """Power-series oracle: sum_m (-1)^m (x/2)^(order+2m) / (m! (order+m)!)."""
    total = 0.0
    for m in range(terms):
        log_mag = (order + 2 * m) * math.log(x / 2.0) if x > 0 else -math.inf
        log_mag -= math.lgamma(m + 1) + math.lgamma(order + m + 1)
        total += (-1.0) ** m * math.exp(log_mag)
    return total if x > 0 else (1.0 if order == 0 else 0.0)


class TestBackwardRecurrence:
    @pytest.mark.parametrize("x", [0.3, 1.8, 5.0])
    def test_matches_power_series_at_small_order(self, x):
        row = bessel_j_row(12, x)
        for order in range(13):
            assert row[order] == pytest.approx(bessel_series(order, x), abs=1e-12)

    def test_zero_argument(self):
        row = bessel_j_row(6, 0.0)
        assert row[0] == 1.0
        assert (row[1:] == 0.0).all()

    def test_normalization_identity(self):
        # J_0^2 + 2 sum_k J_k^2 = 1
        for x in (0.5, 1.8, 9.0):
            row = bessel_j_row(60, x)
            total = row[0] ** 2 + 2.0 * np.sum(row[1:] ** 2)
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            bessel_j_row(-1, 1.0)
        with pytest.raises(ValueError):
            bessel_j_row(3, -1.0)


class TestKickKernel:
    def test_zero_strength_is_identity(self):
        orders, kernel = kick_kernel(0.0)
        center = np.where(orders == 0)[0][0]
        assert kernel[center] == 1.0
        assert np.abs(np.delete(kernel, center)).max() == 0.0

    def test_symmetric_in_order(self):
        orders, kernel = kick_kernel(1.8)
        assert np.allclose(kernel, kernel[::-1])

    def test_unitary_column(self):
        # the column of a unitary operator has unit norm
        _, kernel = kick_kernel(1.8)
        assert np.sum(np.abs(kernel) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_phase_pattern(self):
        orders, kernel = kick_kernel(1.8)
        for k, value in zip(orders, kernel):
            expected_phase = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)[abs(int(k)) % 4]
            magnitude = bessel_series(abs(int(k)), 1.8)
            assert value == pytest.approx(expected_phase * magnitude, abs=1e-12)

    def test_tail_below_tolerance(self):
        orders, kernel = kick_kernel(1.8, tail_tol=1e-18)
        assert abs(kernel[0]) < 1e-15
        assert abs(kernel[-1]) < 1e-15
