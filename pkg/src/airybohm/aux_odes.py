"""Auxiliary classical machinery: X(t), δ(t), t′(t) and caustics.

The wave-packet construction pushes all potential dependence into two
classical ODEs on a shared time grid,

    Ẍ + ω²(t) X = F(t)/m          (guiding center, forced oscillator)
    δ̈ + ω²(t) δ = 0               (scale factor, Hill-type)

with δ(0) = 1, δ̇(0) = 0 imposed.  The reparametrized time

    t′(t) = ∫₀ᵗ dτ/δ²(τ)

is the variable in which the transformed problem is free.  Everything
here is valid up to the first caustic (first zero of δ), where t′ and
the trajectory formula diverge; integration halts there and the caustic
time is recorded.

Solvers use adaptive DOP853 with a local tolerance well below the
requested one; interpolation between stored samples is cubic Hermite on
value/derivative pairs (both are available from the ODE state at no
extra cost, giving C¹ interpolants).  t′ between grid nodes is obtained
by adding a 7-point Gauss–Legendre correction over the partial segment
to the stored node value, which keeps it consistent with adaptive
quadrature of the interpolated δ to ~1e-12 away from the caustic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline

from .errors import CausticDomainError, TabulatedWindowError, ToleranceError

__all__ = [
    "PhysicalParams",
    "PotentialSpec",
    "AuxSolution",
    "ZeroOmega",
    "ConstantOmega",
    "MathieuOmega",
    "TabulatedOmega",
    "ZeroForce",
    "ConstantForce",
    "TabulatedForce",
    "solve_delta",
    "solve_X",
    "hill_basis",
    "reparametrized_time",
    "nested_double_integral",
    "second_solution",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Packet-scale constants ħ, m, B (all strictly positive).

    B has units (action)^{2/3}/length so that B·x/ħ^{2/3} is the
    dimensionless Airy argument; the defaults give the dimensionless
    unit system used by all bundled scenarios.
    """

    hbar: float = 1.0
    m: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.m > 0 and self.B > 0):
            raise ValueError("hbar, m and B must all be strictly positive")


def _as_scalar_or_array(t, values):
    values = np.asarray(values, dtype=float)
    return values if np.ndim(t) else float(values)


@dataclass(frozen=True)
class ZeroOmega:
    def __call__(self, t):
        return _as_scalar_or_array(t, np.zeros_like(np.asarray(t, dtype=float)))

    def check_window(self, t0, t1):
        pass


@dataclass(frozen=True)
class ConstantOmega:
    """Constant ω²; negative values (defocusing) are allowed."""

    omega0_sq: float

    def __call__(self, t):
        arr = np.full_like(np.asarray(t, dtype=float), self.omega0_sq)
        return _as_scalar_or_array(t, arr)

    def check_window(self, t0, t1):
        pass


@dataclass(frozen=True)
class MathieuOmega:
    """ω²(t) = a − 2q·cos(2t/scale), the standard Mathieu form."""

    a: float
    q: float
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("Mathieu scale must be positive")

    def __call__(self, t):
        arr = self.a - 2.0 * self.q * np.cos(2.0 * np.asarray(t, dtype=float) / self.scale)
        return _as_scalar_or_array(t, arr)

    def check_window(self, t0, t1):
        pass


class _TabulatedBase:
    """Cubic-spline interpolation of strictly increasing (t, value) samples."""

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.size < 4 or times.shape != values.shape:
            raise ValueError("tabulated samples need matching 1-D arrays, length >= 4")
        if not np.all(np.diff(times) > 0):
            raise ValueError("tabulated sample times must be strictly increasing")
        self.times = times
        self.values = values
        self._spline = CubicSpline(times, values)

    def __call__(self, t):
        return _as_scalar_or_array(t, self._spline(np.asarray(t, dtype=float)))

    def check_window(self, t0, t1):
        if t0 < self.times[0] or t1 > self.times[-1]:
            raise TabulatedWindowError(
                f"tabulated samples cover [{self.times[0]:g}, {self.times[-1]:g}] "
                f"but the window requires [{t0:g}, {t1:g}]"
            )

    def __repr__(self):
        return (
            f"{type(self).__name__}(n={self.times.size}, "
            f"span=[{self.times[0]:g}, {self.times[-1]:g}])"
        )


class TabulatedOmega(_TabulatedBase):
    pass


class TabulatedForce(_TabulatedBase):
    pass


@dataclass(frozen=True)
class ZeroForce:
    def __call__(self, t):
        return _as_scalar_or_array(t, np.zeros_like(np.asarray(t, dtype=float)))

    def check_window(self, t0, t1):
        pass


@dataclass(frozen=True)
class ConstantForce:
    f0: float

    def __call__(self, t):
        arr = np.full_like(np.asarray(t, dtype=float), self.f0)
        return _as_scalar_or_array(t, arr)

    def check_window(self, t0, t1):
        pass


@dataclass(frozen=True)
class PotentialSpec:
    """The pair (ω²(t), F(t)) defining V(x, t) = ½ m ω² x² − F x."""

    omega_sq: Callable = field(default_factory=ZeroOmega)
    force: Callable = field(default_factory=ZeroForce)

    def check_window(self, t0, t1):
        self.omega_sq.check_window(t0, t1)
        self.force.check_window(t0, t1)

    # -- convenience constructors for the common cases -----------------
    @classmethod
    def free(cls):
        return cls(ZeroOmega(), ZeroForce())

    @classmethod
    def constant_force(cls, f0):
        return cls(ZeroOmega(), ConstantForce(f0))

    @classmethod
    def harmonic(cls, omega0_sq, f0=0.0):
        force = ConstantForce(f0) if f0 else ZeroForce()
        return cls(ConstantOmega(omega0_sq), force)

    @classmethod
    def mathieu(cls, a, q, scale=1.0):
        return cls(MathieuOmega(a, q, scale), ZeroForce())


# 7-point Gauss–Legendre rule, used for partial-segment t′ corrections.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(7)


def _hermite(tg, y, yd, i, t):
    """Cubic Hermite evaluation on segment i of grid tg (scalars or arrays)."""
    h = tg[i + 1] - tg[i]
    s = (t - tg[i]) / h
    s2 = s * s
    s3 = s2 * s
    return (
        (2.0 * s3 - 3.0 * s2 + 1.0) * y[i]
        + (s3 - 2.0 * s2 + s) * h * yd[i]
        + (3.0 * s2 - 2.0 * s3) * y[i + 1]
        + (s3 - s2) * h * yd[i + 1]
    )


@dataclass(frozen=True, eq=False)
class AuxSolution:
    """δ, δ̇, X, Ẋ, t′ on a shared grid, with caustic metadata.

    Immutable after construction; arrays are marked read-only so the
    object can be shared freely across threads.  ``caustic_time`` is the
    root-refined first zero of δ if one occurs inside the solved window,
    else None.  All stored samples lie strictly before the caustic.
    """

    t_grid: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    delta_dot: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    X_dot: np.ndarray = field(repr=False)
    t_prime: np.ndarray = field(repr=False)
    caustic_time: float | None
    delta0: float = 1.0
    X0: float = 0.0
    # second derivatives at the nodes, for C¹ Hermite interpolation
    delta_ddot: np.ndarray = field(repr=False, default=None)
    X_ddot: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        for arr in (self.t_grid, self.delta, self.delta_dot, self.X,
                    self.X_dot, self.t_prime, self.delta_ddot, self.X_ddot):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def t_end(self) -> float:
        return float(self.t_grid[-1])

    # -- domain handling ----------------------------------------------
    def _check_domain(self, t):
        tmin = np.min(t)
        tmax = np.max(t)
        if tmin < 0:
            raise ValueError(f"t = {tmin:g} is before the initial time 0")
        if self.caustic_time is not None and tmax >= self.caustic_time:
            raise CausticDomainError(tmax, self.caustic_time)
        if tmax > self.t_grid[-1] * (1.0 + 1e-12) + 1e-300:
            if self.caustic_time is not None:
                # inside the unresolved sliver just below the caustic
                raise CausticDomainError(tmax, self.caustic_time)
            raise ValueError(
                f"t = {tmax:g} is beyond the solved window (t_end = "
                f"{self.t_grid[-1]:g}); re-solve with a longer window"
            )

    def _segment(self, t):
        i = np.searchsorted(self.t_grid, t, side="right") - 1
        return np.clip(i, 0, self.t_grid.size - 2)

    # -- interpolated evaluations -------------------------------------
    def delta_at(self, t):
        self._check_domain(t)
        return _hermite(self.t_grid, self.delta, self.delta_dot, self._segment(t), t)

    def delta_dot_at(self, t):
        self._check_domain(t)
        return _hermite(self.t_grid, self.delta_dot, self.delta_ddot, self._segment(t), t)

    def X_at(self, t):
        self._check_domain(t)
        return _hermite(self.t_grid, self.X, self.X_dot, self._segment(t), t)

    def X_dot_at(self, t):
        self._check_domain(t)
        return _hermite(self.t_grid, self.X_dot, self.X_ddot, self._segment(t), t)

    def _t_prime_scalar(self, t, i):
        t0 = self.t_grid[i]
        half = 0.5 * (t - t0)
        if half == 0.0:
            return self.t_prime[i]
        taus = t0 + half * (_GL_X + 1.0)
        dl = _hermite(self.t_grid, self.delta, self.delta_dot, i, taus)
        return self.t_prime[i] + half * float(np.dot(_GL_W, 1.0 / (dl * dl)))

    def t_prime_at(self, t):
        self._check_domain(t)
        if np.ndim(t) == 0:
            return self._t_prime_scalar(float(t), int(self._segment(t)))
        t = np.asarray(t, dtype=float)
        idx = self._segment(t)
        return np.array([self._t_prime_scalar(tv, int(iv)) for tv, iv in zip(t, idx)])

    def eval_all(self, t: float):
        """(δ, δ̇, X, Ẋ, t′) at scalar t with one segment lookup.

        This is the hot path of the guidance-equation integrator.
        """
        self._check_domain(t)
        i = int(self._segment(t))
        tg = self.t_grid
        h = tg[i + 1] - tg[i]
        s = (t - tg[i]) / h
        s2 = s * s
        s3 = s2 * s
        h00 = 2.0 * s3 - 3.0 * s2 + 1.0
        h10 = (s3 - 2.0 * s2 + s) * h
        h01 = 3.0 * s2 - 2.0 * s3
        h11 = (s3 - s2) * h
        d = h00 * self.delta[i] + h10 * self.delta_dot[i] + h01 * self.delta[i + 1] + h11 * self.delta_dot[i + 1]
        dd = h00 * self.delta_dot[i] + h10 * self.delta_ddot[i] + h01 * self.delta_dot[i + 1] + h11 * self.delta_ddot[i + 1]
        x = h00 * self.X[i] + h10 * self.X_dot[i] + h01 * self.X[i + 1] + h11 * self.X_dot[i + 1]
        xd = h00 * self.X_dot[i] + h10 * self.X_ddot[i] + h01 * self.X_dot[i + 1] + h11 * self.X_ddot[i + 1]
        return d, dd, x, xd, self._t_prime_scalar(t, i)


def _normalize_window(window):
    if np.ndim(window) == 0:
        t0, t1 = 0.0, float(window)
    else:
        t0, t1 = (float(w) for w in window)
    if t0 != 0.0:
        raise ValueError("the time window must start at t = 0")
    if not (t1 > 0.0 and math.isfinite(t1)):
        raise ValueError("the time window must end at a finite t > 0")
    return t1


def _solver_tols(tol):
    if not (tol > 0):
        raise ValueError("tolerance must be positive")
    r = max(tol * 1e-3, 1e-13)
    return r, r


def _solve_aux(pot, window, ics, params, tol):
    """Shared driver behind solve_delta / solve_X."""
    t_end = _normalize_window(window)
    rtol, atol = _solver_tols(tol)
    pot.check_window(0.0, t_end)
    omega_sq = pot.omega_sq
    force = pot.force
    m = params.m
    x0, v0 = (float(v) for v in ics)

    def rhs4(t, y):
        w2 = omega_sq(t)
        return (y[1], -w2 * y[0], y[3], force(t) / m - w2 * y[2])

    def caustic_event(t, y):
        return y[0]

    caustic_event.terminal = True
    caustic_event.direction = -1.0

    probe = solve_ivp(
        rhs4, (0.0, t_end), [1.0, 0.0, x0, v0],
        method="DOP853", rtol=rtol, atol=atol, events=caustic_event,
    )
    if probe.status == -1:
        raise ToleranceError(f"step control failed: {probe.message}")
    caustic = float(probe.t_events[0][0]) if probe.t_events[0].size else None

    if caustic is not None:
        # dense main grid to 98% of the caustic, then a geometric tail
        # that resolves the 1/δ² blow-up down to ~2e-7 of the caustic time
        main_end = 0.98 * caustic
        gap = caustic - main_end
        tail = caustic - gap * np.geomspace(1.0, 1e-5, 64)[1:]
        n_main = max(801, int(np.ceil(200.0 * main_end)) + 1)
        grid = np.concatenate([np.linspace(0.0, main_end, n_main), tail])
    else:
        n = max(801, int(np.ceil(200.0 * t_end)) + 1)
        grid = np.linspace(0.0, t_end, n)

    def rhs5(t, y):
        w2 = omega_sq(t)
        return (y[1], -w2 * y[0], y[3], force(t) / m - w2 * y[2], 1.0 / (y[0] * y[0]))

    sol = solve_ivp(
        rhs5, (0.0, grid[-1]), [1.0, 0.0, x0, v0, 0.0],
        method="DOP853", rtol=rtol, atol=atol, t_eval=grid,
    )
    if sol.status != 0:
        raise ToleranceError(f"step control failed: {sol.message}")

    w2g = np.asarray(omega_sq(grid), dtype=float)
    fg = np.asarray(force(grid), dtype=float)
    delta, delta_dot, x_arr, xd_arr, tp = (np.ascontiguousarray(r) for r in sol.y)
    return AuxSolution(
        t_grid=grid,
        delta=delta,
        delta_dot=delta_dot,
        X=x_arr,
        X_dot=xd_arr,
        t_prime=tp,
        caustic_time=caustic,
        delta0=1.0,
        X0=x0,
        delta_ddot=-w2g * delta,
        X_ddot=fg / m - w2g * x_arr,
    )


def solve_delta(pot: PotentialSpec, window, tol: float = 1e-10) -> AuxSolution:
    """Solve δ̈ + ω²(t)δ = 0 with δ(0)=1, δ̇(0)=0 over window = [0, T].

    Integration halts at the first zero of δ (the caustic), which is
    root-refined and recorded in ``caustic_time``.  The X-part of the
    returned solution is identically zero.
    """
    return _solve_aux(pot, window, (0.0, 0.0), PhysicalParams(), tol)


def solve_X(
    pot: PotentialSpec,
    window,
    ics=(0.0, 0.0),
    params: PhysicalParams = PhysicalParams(),
    tol: float = 1e-10,
) -> AuxSolution:
    """Solve Ẍ + ω²(t)X = F(t)/m together with the δ equation.

    Both parts share one grid (and one caustic determination), so the
    result is the complete auxiliary input for the wavefunction and
    trajectory formulas.  ``ics`` is (X(0), Ẋ(0)); the packet formulas
    place no constraint on them, and (0, 0) reproduces the
    impulse-response form X(t) = (1/m)∫₀ᵗ (t−τ) F(τ) dτ.
    """
    return _solve_aux(pot, window, ics, params, tol)


def hill_basis(pot: PotentialSpec, window, tol: float = 1e-10, n_samples: int | None = None):
    """Fundamental pair (δ₁, δ₂) of the Hill equation on [0, T].

    δ₁(0)=1, δ̇₁(0)=0 and δ₂(0)=0, δ̇₂(0)=1, so the Wronskian
    δ₁δ̇₂ − δ̇₁δ₂ is identically 1; its numerical drift is an integrator
    health check.  No caustic halting here — the basis solutions are
    regular through zeros of δ₁ (only t′ is singular there).

    Returns (t, δ₁, δ̇₁, δ₂, δ̇₂) as arrays.
    """
    t_end = _normalize_window(window)
    rtol, atol = _solver_tols(tol)
    pot.check_window(0.0, t_end)
    omega_sq = pot.omega_sq

    def rhs(t, y):
        w2 = omega_sq(t)
        return (y[1], -w2 * y[0], y[3], -w2 * y[2])

    n = n_samples or max(801, int(np.ceil(100.0 * t_end)) + 1)
    grid = np.linspace(0.0, t_end, n)
    sol = solve_ivp(
        rhs, (0.0, t_end), [1.0, 0.0, 0.0, 1.0],
        method="DOP853", rtol=rtol, atol=atol, t_eval=grid,
    )
    if sol.status != 0:
        raise ToleranceError(f"step control failed: {sol.message}")
    return (grid, *(np.ascontiguousarray(r) for r in sol.y))


def reparametrized_time(aux: AuxSolution, t) -> float:
    """t′(t) = ∫₀ᵗ dτ/δ²(τ) for 0 ≤ t < caustic_time."""
    return aux.t_prime_at(t)


def nested_double_integral(aux: AuxSolution, t, method: str = "identity"):
    """I(t) = ∫₀ᵗ (1/δ²(s)) ∫₀ˢ dτ/δ²(τ) ds.

    The chain rule collapses the nested integral exactly: the outer
    integrand is t′(s)·dt′/ds, so I(t) = t′(t)²/2.  ``method="identity"``
    uses that closed form; ``method="quadrature"`` evaluates the nested
    integral literally with adaptive quadrature over the interpolated δ,
    as an independent route for testing.
    """
    if method == "identity":
        tp = aux.t_prime_at(t)
        return 0.5 * tp * tp
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    aux._check_domain(t)

    def inv_delta_sq(tau):
        i = aux._segment(tau)
        d = _hermite(aux.t_grid, aux.delta, aux.delta_dot, i, tau)
        return 1.0 / (d * d)

    def inner(s):
        val, _ = quad(inv_delta_sq, 0.0, s, epsabs=1e-12, epsrel=1e-11, limit=200)
        return val

    val, _ = quad(
        lambda s: inner(s) * inv_delta_sq(s), 0.0, float(t),
        epsabs=1e-11, epsrel=1e-10, limit=200,
    )
    return val


def second_solution(aux: AuxSolution, t):
    """δ₂(t) = δ(t)·t′(t): the second Hill solution, with δ₂(0)=0, δ̇₂(0)=1."""
    return aux.delta_at(t) * aux.t_prime_at(t)
