import math

import pytest

from ptcycle.cycles import (
    CycleKind,
    PathLabel,
    StepKind,
    build_cycle,
    entropy_match_candidates,
    entropy_match_lambda,
    solve_broken_corners,
    step_integrals,
    stirling_matching_cv,
    stirling_reference_efficiency,
    time_evolution_step,
    time_isentrope_solve,
    trace_isentrope_lambda,
    trace_isentrope_nu,
)
from ptcycle.errors import (
    BranchLost,
    CycleInfeasible,
    InvalidRatio,
    MultiValued,
    NoRootInBracket,
)
from ptcycle.spectrum import ModelParams, TimeDependence

# broken-regime reference configuration (equal-entropy temperature pair)
N, NU, LAM1 = 160, 12.0, -24.0
T1, T2 = 5.53240, 5.91528
S1, S2 = -2.51338, 3.16977
# frozen from an independent sign-change scan + Brent refinement of
# S(T1, lam) - S(T2, lam) over [-45, -30]
LAM2 = -38.000061232

# unbroken-regime configuration
NS, NUS = 120, 25.0
TS1, TS2 = 35.5489, 88.4576
SS1, SS2 = 4.7726, 6.0


@pytest.fixture(scope="module")
def tl_cycle():
    return build_cycle(CycleKind.T_LAMBDA, T1=T1, T2=T2, nu=NU, N=N,
                       lam1=LAM1, lambda2_bracket=(-45.0, -30.0), target_S2=S2)


@pytest.fixture(scope="module")
def carnot_cycle():
    return build_cycle(CycleKind.CARNOT_BROKEN, T1=T1, T2=T2, nu=NU, N=N,
                       lam1=LAM1, lam2=LAM2)


class TestEntropyMatch:
    def test_recovers_reference_coupling(self):
        lam, s = entropy_match_lambda(T1, T2, NU, N, (-24.5, -23.5))
        assert lam == pytest.approx(-24.0, abs=1e-3)
        assert s == pytest.approx(S1, abs=1e-3)

    def test_derives_second_coupling(self):
        lam, s = entropy_match_lambda(T1, T2, NU, N, (-45.0, -30.0), target_S=S2)
        assert lam == pytest.approx(LAM2, abs=1e-6)
        assert s == pytest.approx(S2, abs=1e-3)

    def test_candidates_enumerated(self):
        cands = entropy_match_candidates(T1, T2, NU, N, (-45.0, -20.0))
        assert len(cands) >= 2
        lams = [c[0] for c in cands]
        assert any(abs(l + 24.0) < 1e-2 for l in lams)
        assert any(abs(l - LAM2) < 1e-2 for l in lams)

    def test_ambiguous_without_target(self):
        with pytest.raises(MultiValued):
            entropy_match_lambda(T1, T2, NU, N, (-45.0, -20.0))

    def test_no_root_in_unbroken_window(self):
        with pytest.raises(NoRootInBracket):
            entropy_match_lambda(TS1, TS2, NUS, NS, (1e-3, NUS ** 2 / NS - 1e-6))


class TestIsentropeNu:
    def test_degenerate_range(self):
        path = trace_isentrope_nu(S1, LAM1, N, T1, T1, 33, nu_guess=NU)
        assert len(path.samples) == 1
        assert path.samples[0][1] == pytest.approx(NU, abs=2e-5)

    def test_endpoints_recover_cycle_nu(self):
        path = trace_isentrope_nu(S1, LAM1, N, T2, T1, 33, nu_guess=NU)
        assert path.samples[0][1] == pytest.approx(NU, abs=2e-5)
        assert path.samples[-1][1] == pytest.approx(NU, abs=2e-5)
        # interior of the arch bulges away from the endpoint value
        assert max(v for _, v in path.samples) > NU + 0.2

    def test_branch_lost_for_unreachable_level(self):
        with pytest.raises(BranchLost):
            trace_isentrope_nu(-50.0, LAM1, N, T1, T2, 9, nu_guess=NU)


class TestIsentropeLambda:
    @pytest.mark.parametrize("level", [SS2, SS1])
    def test_single_valued_in_unbroken_regime(self, level):
        path = trace_isentrope_lambda(level, NUS, NS, TS2, TS1, 25,
                                      (1e-3, NUS ** 2 / NS - 1e-6))
        assert len(path.samples) == 25
        Ts = [t for t, _ in path.samples]
        assert Ts == sorted(Ts, reverse=True)

    def test_multivalued_in_broken_regime(self):
        with pytest.raises(MultiValued):
            trace_isentrope_lambda(S1, NU, N, T1, T2, 9, (-45.0, -5.0))


class TestStepIntegrals:
    def test_isothermal_hot(self, tl_cycle):
        s = tl_cycle.steps[0]
        assert (s.dQ, s.dW, s.dU) == pytest.approx((33.6174, 2.1172, 31.5002), abs=1e-3)

    def test_iso_lambda(self, tl_cycle):
        s = tl_cycle.steps[1]
        assert (s.dQ, s.dW, s.dU) == pytest.approx((0.1054, 0.0, 0.1054), abs=1e-3)

    def test_isentrope_nu(self, carnot_cycle):
        s = carnot_cycle.steps[1]
        assert (s.dQ, s.dW, s.dU) == pytest.approx((0.0, -0.1054, 0.1054), abs=1e-3)

    def test_isothermal_work_is_quadrature(self, tl_cycle):
        # dW from the pressure integral agrees with T dS - dU independently
        for s in (tl_cycle.steps[0], tl_cycle.steps[2]):
            assert s.dW == pytest.approx(s.dQ - s.dU, rel=1e-6)

    def test_rejects_mismatched_endpoints(self, tl_cycle):
        a, b = tl_cycle.points[0], tl_cycle.points[2]
        with pytest.raises(ValueError):
            step_integrals(StepKind.ISOTHERMAL, a, b, N)


class TestBuildCycle:
    def test_tlambda_totals(self, tl_cycle):
        assert tl_cycle.path_label is PathLabel.GAMMA2
        assert tl_cycle.loop_W == pytest.approx(2.3238, abs=1e-3)
        assert tl_cycle.efficiency == pytest.approx(0.0688, abs=5e-4)

    def test_carnot_totals(self, carnot_cycle):
        assert carnot_cycle.path_label is PathLabel.GAMMA1
        assert carnot_cycle.loop_W == pytest.approx(2.1760, abs=1e-3)
        assert carnot_cycle.efficiency == pytest.approx(0.06473, abs=5e-5)
        assert carnot_cycle.efficiency == pytest.approx(1.0 - T1 / T2, abs=1e-12)

    def test_corner_energies(self, tl_cycle):
        got = [p.U for p in tl_cycle.points]
        assert got == pytest.approx([-14.0513, 17.4488, 17.5543, -14.0937], abs=5e-4)

    def test_first_law_each_step(self, tl_cycle, carnot_cycle):
        for rep in (tl_cycle, carnot_cycle):
            for s in rep.steps:
                assert s.dW - (s.dQ - s.dU) == pytest.approx(0.0, abs=1e-9)

    def test_loop_closure(self, tl_cycle, carnot_cycle):
        for rep in (tl_cycle, carnot_cycle):
            scale = max(abs(s.dU) for s in rep.steps)
            assert abs(rep.loop_U) <= 1e-9 * scale
            assert abs(rep.loop_W - rep.loop_Q) <= 1e-9 * scale

    def test_efficiency_ordering(self, tl_cycle, carnot_cycle):
        eta_stirling = stirling_reference_efficiency(T1, T2, LAM1, LAM2, 1.25)
        assert tl_cycle.efficiency > carnot_cycle.efficiency > eta_stirling

    def test_degenerate_couplings(self):
        rep = build_cycle(CycleKind.T_LAMBDA, T1=T1, T2=T2, nu=NU, N=N,
                          lam1=LAM1, lam2=LAM1)
        assert rep.loop_W == pytest.approx(0.0, abs=1e-12)
        assert rep.efficiency == 0.0

    def test_infeasible_in_unbroken_regime(self):
        with pytest.raises(CycleInfeasible):
            build_cycle(CycleKind.T_LAMBDA, T1=TS1, T2=TS2, nu=NUS, N=NS,
                        lam1=4.5, lambda2_bracket=(1e-3, 5.0), target_S2=SS2)

    def test_symmetric_carnot(self):
        rep = build_cycle(CycleKind.CARNOT_SYMMETRIC, T1=TS1, T2=TS2, nu=NUS,
                          N=NS, S1=SS1, S2=SS2)
        assert rep.efficiency == pytest.approx(1.0 - TS1 / TS2, abs=1e-9)
        assert rep.loop_W == pytest.approx((TS2 - TS1) * (SS2 - SS1), rel=1e-6)
        lams = [p.lam for p in rep.points]
        assert len(set(round(l, 6) for l in lams)) == 4  # four distinct couplings
        # frozen corner couplings from an independent scan of S(T, lam) = level
        assert lams == pytest.approx([1.100127, 4.000001, 5.0, 4.499984], abs=1e-4)
        for s in rep.steps:
            assert s.dW - (s.dQ - s.dU) == pytest.approx(0.0, abs=1e-9)

    def test_snapped_corners_share_entropy(self, tl_cycle):
        p = tl_cycle.points
        assert p[0].S == pytest.approx(p[3].S, abs=1e-12)
        assert p[1].S == pytest.approx(p[2].S, abs=1e-12)


class TestStirling:
    def test_air_value(self):
        eta = stirling_reference_efficiency(T1, T2, LAM1, LAM2, 1.25)
        assert eta == pytest.approx(0.05503, abs=5e-5)

    def test_matching_cv(self, tl_cycle):
        # published matching uses the loop work over the isothermal heat input
        eta = tl_cycle.loop_W / tl_cycle.steps[0].dQ
        cv = stirling_matching_cv(T1, T2, LAM1, LAM2, eta)
        assert cv == pytest.approx(-0.4516, abs=5e-4)
        # the matching really inverts the formula
        assert stirling_reference_efficiency(T1, T2, LAM1, LAM2, cv) == \
            pytest.approx(eta, rel=1e-12)

    def test_zero_span(self):
        assert stirling_reference_efficiency(5.0, 5.0, -24.0, -38.0, 1.25) == 0.0

    def test_invalid_ratio(self):
        with pytest.raises(InvalidRatio):
            stirling_reference_efficiency(T1, T2, -24.0, 24.0, 1.25)
        with pytest.raises(InvalidRatio):
            stirling_reference_efficiency(T1, T2, -24.0, -24.0, 1.25)
        with pytest.raises(InvalidRatio):
            stirling_matching_cv(T1, T2, 3.0, -3.0, 0.05)


class TestTimeIsentrope:
    TD = TimeDependence(c1=4.75)
    MODEL = ModelParams(N, NU, LAM1)

    def test_solved_times_match_reference(self):
        # frozen from an independent scan + Brent solve over the entropy level
        t1 = time_isentrope_solve(S1, T1, self.MODEL, self.TD, (0.00225, 0.00235))
        t2 = time_isentrope_solve(S1, T2, self.MODEL, self.TD, (0.00230, 0.00240))
        assert t1 == pytest.approx(0.0023241646, abs=1e-9)
        assert t2 == pytest.approx(0.0023532429, abs=1e-9)
        assert t2 - t1 == pytest.approx(2.91e-5, abs=1e-7)

    def test_mirrored_pair(self):
        t1p = time_isentrope_solve(S1, T1, self.MODEL, self.TD, (0.0028, 0.0030))
        t2p = time_isentrope_solve(S1, T2, self.MODEL, self.TD, (0.0028, 0.0030))
        assert t1p == pytest.approx(0.0028501, abs=5e-7)
        assert t2p == pytest.approx(0.0028210, abs=5e-7)
        assert t1p - t2p == pytest.approx(2.91e-5, abs=1e-7)

    def test_no_root(self):
        with pytest.raises(NoRootInBracket):
            time_isentrope_solve(10.0, T1, self.MODEL, self.TD, (0.00225, 0.00235))

    def test_time_evolution_step_first_law(self):
        t1 = time_isentrope_solve(S1, T1, self.MODEL, self.TD, (0.00225, 0.00235))
        t2 = time_isentrope_solve(S1, T2, self.MODEL, self.TD, (0.00230, 0.00240))
        dQ, dW, dU = time_evolution_step(T1, t1, T2, t2, self.MODEL, self.TD)
        assert dQ == 0.0
        assert dW == -dU
        assert dU != 0.0


def test_solve_broken_corners_requires_data():
    with pytest.raises(CycleInfeasible):
        solve_broken_corners(T1, T1, NU, N, LAM1, lam2=LAM2)
    with pytest.raises(CycleInfeasible):
        solve_broken_corners(T1, T2, NU, N, LAM1)
