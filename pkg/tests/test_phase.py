import math

import numpy as np
import pytest
from scipy.integrate import quad

from ptcycle.errors import OutOfBinodal
from ptcycle.phase import (
    MAXWELL_PRESSURE,
    binodal_interval,
    critical_temperature_scan,
    heterogeneous_entropy,
    heterogeneous_free_energy,
    isotherm_area,
    lever_fractions,
    phase_regions,
    pressure_zeros,
    spinodal_interval,
)
from ptcycle.spectrum import ModelParams, static_split
from ptcycle.thermo import EvalDomain, free_energy, pressure

T, NU, N = 5.0, 12.0, 160


def p_of(lam, temperature=T):
    return pressure(temperature, ModelParams(N, NU, lam))


def f_of(lam, temperature=T):
    return free_energy(EvalDomain(static_split(ModelParams(N, NU, lam)), temperature))


class TestPressureZeros:
    def test_first_zero_value(self):
        zeros = pressure_zeros(T, N, 1, NU)
        assert zeros[0] == pytest.approx(-math.pi ** 2 * 25.0 / 160.0, rel=1e-10)
        assert abs(p_of(zeros[0])) < 1e-10

    def test_quadratic_index_scaling(self):
        zeros = pressure_zeros(T, N, 4, NU)
        assert zeros[1] == pytest.approx(4.0 * zeros[0], rel=1e-10)
        assert zeros[3] == pytest.approx(16.0 * zeros[0], rel=1e-10)

    def test_quadratic_temperature_scaling(self):
        z1 = pressure_zeros(T, N, 3, NU)
        z2 = pressure_zeros(2 * T, N, 3, NU)
        for a, b in zip(z1, z2):
            assert b == pytest.approx(4.0 * a, rel=1e-10)

    def test_decreasing_order(self):
        zeros = pressure_zeros(T, N, 5, NU)
        assert all(b < a for a, b in zip(zeros[:-1], zeros[1:]))


class TestIsothermArea:
    def test_pairwise_cancellation(self):
        for n in range(1, 6):
            assert isotherm_area(n, T, NU, N) + isotherm_area(n + 1, T, NU, N) == \
                pytest.approx(0.0, abs=1e-9)

    def test_against_independent_quadrature(self):
        for n in (1, 2, 3):
            lo = -(n ** 2) * math.pi ** 2 * T * T / N
            hi = -((n - 1) ** 2) * math.pi ** 2 * T * T / N
            val, err = quad(p_of, hi, lo, limit=200, epsabs=1e-13, epsrel=1e-13)
            assert isotherm_area(n, T, NU, N) == pytest.approx(val, rel=1e-6)

    def test_vanishes_for_large_frequency(self):
        assert abs(isotherm_area(1, T, 1000.0, N)) < 1e-80

    def test_telescoping_sum(self):
        total = sum(isotherm_area(n, T, NU, N) for n in range(1, 9))
        assert total == pytest.approx(0.0, abs=1e-9)


class TestLeverRule:
    def test_endpoints(self):
        m = lever_fractions(-24.674011, -24.674011, -6.1685028)
        assert (m.n1, m.n2) == pytest.approx((1.0, 0.0), abs=1e-12)
        m = lever_fractions(-6.1685028, -24.674011, -6.1685028)
        assert (m.n1, m.n2) == pytest.approx((0.0, 1.0), abs=1e-12)

    def test_midpoint(self):
        m = lever_fractions(-15.0, -24.0, -6.0)
        assert (m.n1, m.n2) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_fractions_sum_to_one(self):
        for lam in np.linspace(-24.0, -6.0, 23):
            m = lever_fractions(float(lam), -24.0, -6.0)
            assert m.n1 + m.n2 == 1.0
            assert 0.0 <= m.n1 <= 1.0

    def test_out_of_range(self):
        with pytest.raises(OutOfBinodal):
            lever_fractions(-30.0, -24.0, -6.0)
        with pytest.raises(ValueError):
            lever_fractions(-6.0, -6.0, -6.0)


class TestHeterogeneousFreeEnergy:
    def test_tangency_at_endpoint(self):
        lo, hi = binodal_interval(T, N, 1)
        assert heterogeneous_free_energy(hi, T, NU, N, 1) == pytest.approx(
            f_of(hi), rel=1e-12)

    def test_endpoint_degeneracy(self):
        lo, hi = binodal_interval(T, N, 1)
        assert f_of(lo) == pytest.approx(f_of(hi), abs=1e-9)

    def test_lies_below_homogeneous(self):
        lo, hi = binodal_interval(T, N, 1)
        for lam in np.linspace(lo, hi, 101):
            fhet = heterogeneous_free_energy(float(lam), T, NU, N, 1)
            assert fhet <= f_of(float(lam)) + 1e-12

    def test_out_of_binodal(self):
        with pytest.raises(OutOfBinodal):
            heterogeneous_free_energy(-1.0, T, NU, N, 1)


class TestSpinodal:
    def test_strictly_inside_binodal(self):
        lo, hi = binodal_interval(T, N, 1)
        s_lo, s_hi = spinodal_interval(T, NU, N, 1)
        assert lo < s_lo < s_hi < hi

    def test_stability_pattern(self):
        s_lo, s_hi = spinodal_interval(T, NU, N, 1)
        lo, hi = binodal_interval(T, N, 1)
        h = 1e-6

        def dp(lam):
            return (p_of(lam + h) - p_of(lam - h)) / (2 * h)

        assert dp(0.5 * (s_lo + s_hi)) > 0.0          # unstable inside
        assert dp(0.5 * (lo + s_lo)) < 0.0            # metastable flanks
        assert dp(0.5 * (s_hi + hi)) < 0.0

    def test_low_temperature_quadratic_scaling(self):
        # as T -> 0 the pressure shape becomes scale-free in N lam / T^2,
        # so spinodal widths inherit the exact T^2 law of the zeros
        a_lo, a_hi = spinodal_interval(0.25, NU, N, 1)
        b_lo, b_hi = spinodal_interval(0.5, NU, N, 1)
        assert (b_hi - b_lo) / (a_hi - a_lo) == pytest.approx(4.0, rel=1e-6)

    def test_moderate_temperature_departure(self):
        # at accessible temperatures the exp(-nu/T) weight shifts the
        # inflection points, so the naive factor-4 law does not hold
        a_lo, a_hi = spinodal_interval(5.0, NU, N, 1)
        b_lo, b_hi = spinodal_interval(10.0, NU, N, 1)
        ratio = (b_hi - b_lo) / (a_hi - a_lo)
        assert 4.0 < ratio < 5.5


class TestCriticalScan:
    def test_binodal_widths_follow_t_squared(self):
        rows = critical_temperature_scan(NU, N, [4.0, 2.0, 1.0, 0.5])
        ratios = [w_bin / Tx ** 2 for Tx, w_bin, _ in rows]
        assert max(ratios) - min(ratios) <= 1e-6 * ratios[0]

    def test_widths_positive_and_shrinking(self):
        rows = critical_temperature_scan(NU, N, [4.0, 2.0, 1.0, 0.5])
        for _, w_bin, w_spin in rows:
            assert w_bin > 0.0 and w_spin > 0.0
        assert all(r1[1] > r2[1] and r1[2] > r2[2]
                   for r1, r2 in zip(rows[:-1], rows[1:]))

    def test_merge_only_at_zero_temperature(self):
        # extrapolating width ~ a T^b gives b = 2: zero width only at T = 0
        rows = critical_temperature_scan(NU, N, [2.0, 1.0, 0.5, 0.25])
        logs = [(math.log(Tx), math.log(w)) for Tx, w, _ in rows]
        slope = (logs[0][1] - logs[-1][1]) / (logs[0][0] - logs[-1][0])
        assert slope == pytest.approx(2.0, abs=1e-9)


class TestHeterogeneousEntropy:
    def test_always_zero(self):
        for Tx in (0.5, 5.0, 50.0):
            assert heterogeneous_entropy(Tx, NU, N) == 0.0

    def test_maxwell_spot_check(self):
        # the embedded finite-difference verification runs at lam = -10
        assert heterogeneous_entropy(T, NU, N, lam_check=-10.0) == 0.0

    def test_mixture_path_integral_vanishes(self):
        # dS = (dp_het/dT) dlam with p_het identically 0 on the Maxwell line
        lo, hi = binodal_interval(T, N, 1)
        total = sum(MAXWELL_PRESSURE * dl for dl in np.diff(np.linspace(lo, hi, 64)))
        assert total == 0.0


def test_phase_regions_assembly():
    regions = phase_regions(T, NU, N, branch=1)
    assert regions.maxwell_pressure == 0.0
    assert regions.binodal[0] < regions.spinodal[0] < regions.spinodal[1] < regions.binodal[1]
    assert regions.zeros[1] == pytest.approx(regions.binodal[1], rel=1e-10)
    assert regions.zeros[3] == pytest.approx(regions.binodal[0], rel=1e-10)
    assert regions.f_het == pytest.approx(f_of(regions.binodal[1]), rel=1e-12)
