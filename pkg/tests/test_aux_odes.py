"""Auxiliary-equation tests: δ/X solvers, t′, caustics, Wronskian."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from airybohm.aux_odes import (
    AuxSolution,
    PhysicalParams,
    PotentialSpec,
    TabulatedForce,
    TabulatedOmega,
    hill_basis,
    nested_double_integral,
    reparametrized_time,
    second_solution,
    solve_X,
    solve_delta,
)
from airybohm.errors import CausticDomainError, TabulatedWindowError, ToleranceError


class _NanOmega:
    """ω² that turns NaN mid-window; used to exercise step-control failure."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t > 1.0, np.nan, 1.0)
        return out if out.ndim else float(out)

    def check_window(self, t0, t1):
        pass


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(hbar=0.0)
    with pytest.raises(ValueError):
        PhysicalParams(m=-1.0)
    p = PhysicalParams()
    assert (p.hbar, p.m, p.B) == (1.0, 1.0, 1.0)


def test_free_delta_flat():
    aux = solve_delta(PotentialSpec.free(), 6.0)
    ts = np.linspace(0.0, 6.0, 61)
    assert aux.caustic_time is None
    assert np.max(np.abs(aux.delta_at(ts) - 1.0)) < 1e-12
    assert np.max(np.abs(aux.t_prime_at(ts) - ts)) < 1e-12


def test_harmonic_delta_is_cosine():
    aux = solve_delta(PotentialSpec.harmonic(1.0), 1.6)
    ts = np.linspace(0.0, 1.5, 76)
    assert np.max(np.abs(aux.delta_at(ts) - np.cos(ts))) < 1e-8
    assert np.max(np.abs(aux.delta_dot_at(ts) + np.sin(ts))) < 1e-8
    assert aux.caustic_time == pytest.approx(np.pi / 2, rel=1e-10)


def test_mathieu_q_zero_equals_constant():
    a1 = solve_delta(PotentialSpec.mathieu(1.0, 0.0), 1.5)
    a2 = solve_delta(PotentialSpec.harmonic(1.0), 1.5)
    assert np.allclose(a1.delta, a2.delta, rtol=1e-13, atol=1e-15)
    assert np.allclose(a1.delta_dot, a2.delta_dot, rtol=1e-13, atol=1e-15)


def test_X_trivial_zero():
    aux = solve_X(PotentialSpec.free(), 4.0)
    ts = np.linspace(0.0, 4.0, 17)
    assert np.max(np.abs(aux.X_at(ts))) == 0.0
    assert aux.X0 == 0.0


def test_X_constant_force_parabola():
    # Ẍ = F₀/m from rest: X = F₀t²/(2m), the impulse-response integral
    aux = solve_X(PotentialSpec.constant_force(2.0), 3.0, params=PhysicalParams(m=4.0))
    ts = np.linspace(0.0, 3.0, 31)
    assert np.max(np.abs(aux.X_at(ts) - 2.0 * ts**2 / 8.0)) < 1e-8


def test_X_harmonic_cosine():
    # window stops short of the δ-caustic at π/4 (X halts jointly with δ)
    aux = solve_X(PotentialSpec.harmonic(4.0), 0.75, ics=(1.0, 0.0))
    ts = np.linspace(0.0, 0.74, 40)
    assert np.max(np.abs(aux.X_at(ts) - np.cos(2.0 * ts))) < 1e-8
    assert np.max(np.abs(aux.X_dot_at(ts) + 2.0 * np.sin(2.0 * ts))) < 1e-7


def test_reparametrized_time_harmonic():
    """t′ = tan(ω₀t)/ω₀ for δ = cos(ω₀t), checked against quadrature."""
    w0 = np.sqrt(2.0)
    aux = solve_delta(PotentialSpec.harmonic(2.0), 1.2)
    for t in [0.0, 0.3, 0.7, 1.0]:
        tp = reparametrized_time(aux, t)
        assert tp == pytest.approx(np.tan(w0 * t) / w0, abs=1e-9)
        ref, _ = quad(lambda s: 1.0 / aux.delta_at(s) ** 2, 0.0, t, epsabs=1e-13, limit=200)
        assert tp == pytest.approx(ref, abs=1e-9)


def test_t_prime_monotone_and_zero_at_origin():
    aux = solve_delta(PotentialSpec.mathieu(1.0, 0.2), 3.0)
    assert aux.t_prime[0] == 0.0
    assert np.all(np.diff(aux.t_prime) > 0)
    assert aux.delta[0] == 1.0 and aux.delta_dot[0] == 0.0
    if aux.caustic_time is not None:
        assert np.all(aux.t_grid < aux.caustic_time)


def test_caustic_domain_error():
    aux = solve_delta(PotentialSpec.harmonic(1.0), 1.6)
    for t_bad in [np.pi / 2, 1.58, 5.0]:
        with pytest.raises(CausticDomainError) as exc:
            reparametrized_time(aux, t_bad)
        assert exc.value.caustic_time == pytest.approx(np.pi / 2, rel=1e-10)
    with pytest.raises(CausticDomainError):
        aux.delta_at(np.array([0.1, 1.6]))


def test_beyond_window_raises_without_caustic():
    aux = solve_delta(PotentialSpec.free(), 2.0)
    with pytest.raises(ValueError, match="beyond the solved window"):
        aux.delta_at(2.5)
    with pytest.raises(ValueError):
        aux.delta_at(-0.1)


def test_nested_double_integral_free():
    aux = solve_delta(PotentialSpec.free(), 3.0)
    assert nested_double_integral(aux, 0.0) == 0.0
    assert nested_double_integral(aux, 2.0) == pytest.approx(2.0, abs=1e-10)


def test_nested_double_integral_identity_vs_quadrature():
    for pot, t_max in [
        (PotentialSpec.free(), 2.5),
        (PotentialSpec.harmonic(1.0), 1.4),
        (PotentialSpec.mathieu(1.0, 0.2), 1.63),
    ]:
        aux = solve_delta(pot, t_max)
        for t in [0.4 * t_max, t_max]:
            ident = nested_double_integral(aux, t)
            literal = nested_double_integral(aux, t, method="quadrature")
            assert ident == pytest.approx(literal, abs=1e-8)
    aux = solve_delta(PotentialSpec.harmonic(1.0), 1.4)
    assert nested_double_integral(aux, 1.3) == pytest.approx(np.tan(1.3) ** 2 / 2, abs=1e-8)
    with pytest.raises(ValueError):
        nested_double_integral(aux, 1.0, method="bogus")


def test_second_solution():
    aux_free = solve_delta(PotentialSpec.free(), 3.0)
    assert second_solution(aux_free, 0.0) == 0.0
    assert second_solution(aux_free, 2.2) == pytest.approx(2.2, abs=1e-10)
    aux = solve_delta(PotentialSpec.harmonic(1.0), 1.5)
    ts = np.linspace(0.0, 1.45, 30)
    assert np.max(np.abs(second_solution(aux, ts) - np.sin(ts))) < 1e-8


def test_second_solution_satisfies_hill_equation():
    # δ₂ from the Mathieu scenario, second difference vs −ω²δ₂
    pot = PotentialSpec.mathieu(1.0, 0.2)
    aux = solve_delta(pot, 1.6)
    h = 2e-3  # large enough that interpolation noise survives the /h²
    for t in [0.3, 0.8, 1.3]:
        d2 = [second_solution(aux, t + k * h) for k in (-1, 0, 1)]
        acc = (d2[0] - 2 * d2[1] + d2[2]) / h**2
        assert acc == pytest.approx(-pot.omega_sq(t) * d2[1], abs=2e-5)


def test_wronskian_drift_over_long_window():
    for pot in [
        PotentialSpec.free(),
        PotentialSpec.harmonic(1.0),
        PotentialSpec.mathieu(1.0, 0.2),
    ]:
        t, d1, d1d, d2, d2d = hill_basis(pot, 10.0)
        assert np.max(np.abs(d1 * d2d - d1d * d2 - 1.0)) <= 1e-7


def test_forcing_linearity():
    ts = np.linspace(0.0, 4.0, 81)
    fa = TabulatedForce(ts, np.sin(ts))
    fb = TabulatedForce(ts, 0.5 * ts)
    fab = TabulatedForce(ts, np.sin(ts) + 0.5 * ts)
    omega = PotentialSpec.mathieu(-0.3, 0.5).omega_sq  # caustic-free over the window
    xa = solve_X(PotentialSpec(omega, fa), 3.5)
    xb = solve_X(PotentialSpec(omega, fb), 3.5)
    xab = solve_X(PotentialSpec(omega, fab), 3.5)
    tt = np.linspace(0.0, 3.5, 36)
    assert np.max(np.abs(xab.X_at(tt) - xa.X_at(tt) - xb.X_at(tt))) < 1e-8


def test_grid_refinement_consistency():
    # halving the tolerance moves the endpoint by less than the coarser tol
    pot = PotentialSpec.mathieu(-0.3, 0.5)
    coarse = solve_delta(pot, 5.0, tol=1e-6)
    fine = solve_delta(pot, 5.0, tol=5e-7)
    assert abs(coarse.delta_at(5.0) - fine.delta_at(5.0)) < 1e-6


def test_tabulated_window_and_validation():
    with pytest.raises(TabulatedWindowError):
        solve_delta(PotentialSpec(omega_sq=TabulatedOmega([0, 1, 2, 3], [1, 1, 1, 1])), 5.0)
    with pytest.raises(ValueError, match="strictly increasing"):
        TabulatedOmega([0.0, 1.0, 1.0, 2.0], [1.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        TabulatedOmega([0.0, 1.0], [1.0, 1.0])
    # NaN samples are rejected up front, not discovered mid-solve
    with pytest.raises(ValueError):
        TabulatedOmega([0.0, 1.0, 2.0, 3.0], [1.0, np.nan, 1.0, 1.0])


def test_tabulated_potential_solves():
    ts = np.linspace(0.0, 4.0, 161)
    pot = PotentialSpec(omega_sq=TabulatedOmega(ts, np.full_like(ts, 1.0)))
    aux = solve_delta(pot, 2.0)  # window crosses the π/2 caustic
    tt = np.linspace(0.0, 1.45, 30)
    assert np.max(np.abs(aux.delta_at(tt) - np.cos(tt))) < 1e-7
    assert aux.caustic_time == pytest.approx(np.pi / 2, rel=1e-7)


def test_tolerance_error_on_nan_rhs():
    with pytest.raises(ToleranceError):
        solve_delta(PotentialSpec(omega_sq=_NanOmega()), 3.0)


def test_window_and_tol_validation():
    with pytest.raises(ValueError):
        solve_delta(PotentialSpec.free(), (1.0, 2.0))  # must start at 0
    with pytest.raises(ValueError):
        solve_delta(PotentialSpec.free(), -1.0)
    with pytest.raises(ValueError):
        solve_delta(PotentialSpec.free(), 1.0, tol=0.0)


def test_solution_arrays_are_readonly():
    aux = solve_delta(PotentialSpec.free(), 1.0)
    with pytest.raises((ValueError, RuntimeError)):
        aux.delta[0] = 2.0


@given(st.floats(min_value=0.25, max_value=9.0))
@settings(max_examples=20, deadline=None)
def test_constant_omega_caustic_location(omega_sq):
    # δ = cos(ω₀ t) ⇒ first caustic at π/(2ω₀)
    w0 = np.sqrt(omega_sq)
    aux = solve_delta(PotentialSpec.harmonic(omega_sq), 2.0 * np.pi / w0)
    assert aux.caustic_time == pytest.approx(np.pi / (2 * w0), rel=1e-8)


_MATHIEU_AUX = solve_delta(PotentialSpec.mathieu(-0.3, 0.5), 3.0)


@given(st.floats(min_value=0.1, max_value=2.8))
@settings(max_examples=25, deadline=None)
def test_t_prime_strictly_increasing_property(t):
    aux = _MATHIEU_AUX
    eps = 1e-3
    if t + eps < (aux.caustic_time or np.inf) and t + eps <= aux.t_end:
        assert aux.t_prime_at(t + eps) > aux.t_prime_at(t)
