"""Exact Airy wave packet: amplitude, density, phase gradient, ψ itself.

With the auxiliary pair (X(t), δ(t)) and the reparametrized time t′(t)
in hand, the packet in a (possibly time-dependent) quadratic potential is

    ψ(x, t) = δ^{−1/2} · Ai( (B/ħ^{2/3}) [ (x − X)/δ − (B³/4m²) t′² ] ) · e^{iφ/ħ}

with phase gradient

    ∂φ/∂x = m (δ̇/δ)(x − X) + m Ẋ + B³ t′ / (2 m δ).

Only the x-derivative of φ is fixed by the construction; the remaining
x-independent, time-only phase is unobservable in densities and
trajectories.  ``complex_psi`` therefore fixes the gauge φ(x_ref, t) = 0
at a declared reference point and integrates the gradient analytically
(it is linear in x, so the integral is exact).

All evaluators accept scalar or array ``x`` at a scalar time ``t`` and
are valid for 0 ≤ t < caustic_time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aux_odes import AuxSolution, PhysicalParams
from .specfun import airy_ai_arrays

__all__ = [
    "WavePoint",
    "airy_argument",
    "density",
    "velocity_field",
    "complex_psi",
    "wave_point",
]


@dataclass(frozen=True)
class WavePoint:
    """Pointwise packet data: |ψ|², ∂φ/∂x, and the Ai argument.

    amplitude_sq is Ai(airy_argument)²/δ by construction and therefore
    non-negative.
    """

    amplitude_sq: float
    phase_gradient: float
    airy_argument: float


def _ai_values(z):
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    ai, aip = airy_ai_arrays(z_arr)
    if np.ndim(z) == 0:
        return float(ai[0]), float(aip[0])
    return ai, aip


def airy_argument(x, t: float, params: PhysicalParams, aux: AuxSolution):
    """Dimensionless argument handed to Ai in the exact solution."""
    d, _, X, _, tp = aux.eval_all(float(t))
    scale = params.B / params.hbar ** (2.0 / 3.0)
    drift = (params.B**3 / (4.0 * params.m**2)) * tp * tp
    x_arr = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    return scale * ((x_arr - X) / d - drift)


def density(x, t: float, params: PhysicalParams, aux: AuxSolution):
    """|ψ(x, t)|² = Ai²(argument)/δ(t); reduces to the Berry–Balazs
    density when δ ≡ 1."""
    d = aux.delta_at(float(t))
    z = airy_argument(x, t, params, aux)
    ai, _ = _ai_values(z)
    return ai * ai / d


def velocity_field(x, t: float, params: PhysicalParams, aux: AuxSolution):
    """Bohmian velocity v = (1/m) ∂φ/∂x at (x, t)."""
    d, dd, X, Xd, tp = aux.eval_all(float(t))
    x_arr = np.asarray(x, dtype=float) if np.ndim(x) else x
    return Xd + (x_arr - X) * (dd / d) + params.B**3 * tp / (2.0 * params.m**2 * d)


def complex_psi(x, t: float, params: PhysicalParams, aux: AuxSolution, x_ref: float = 0.0):
    """ψ(x, t) with the gauge φ(x_ref, t) = 0.

    The modulus is Ai(argument)/√δ.  The phase is the exact integral of
    ∂φ/∂x from x_ref (the gradient is linear in x):

        φ(x) = m δ̇/(2δ) [(x−X)² − (x_ref−X)²]
               + [m Ẋ + B³ t′/(2 m δ)] (x − x_ref).

    Any additional time-only phase is set to zero; that choice drops out
    of every density, velocity, and trajectory.
    """
    d, dd, X, Xd, tp = aux.eval_all(float(t))
    z = airy_argument(x, t, params, aux)
    ai, _ = _ai_values(z)
    x_arr = np.asarray(x, dtype=float) if np.ndim(x) else x
    m = params.m
    phi = (
        0.5 * m * (dd / d) * ((x_arr - X) ** 2 - (x_ref - X) ** 2)
        + (m * Xd + params.B**3 * tp / (2.0 * m * d)) * (x_arr - x_ref)
    )
    return (ai / np.sqrt(d)) * np.exp(1j * phi / params.hbar)


def wave_point(x: float, t: float, params: PhysicalParams, aux: AuxSolution) -> WavePoint:
    """Scalar bundle of |ψ|², ∂φ/∂x and the Ai argument at one (x, t)."""
    z = airy_argument(x, t, params, aux)
    amp2 = density(x, t, params, aux)
    grad = params.m * velocity_field(x, t, params, aux)
    return WavePoint(amplitude_sq=float(amp2), phase_gradient=float(grad), airy_argument=float(z))
