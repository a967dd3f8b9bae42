"""Conserved quantities and symmetry transformations for the double-power NLS

    i u_t + Lap u + mu1 |u|^(p1-2) u + mu2 |u|^(p2-2) u = 0

with the two critical powers p1 = 2 + 4/d (L^2-critical) and
p2 = 2 + 4/(d-2) (H^1-critical).  Signs mu = +1 mean focusing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import DomainError, PreconditionError, TruncationWarning
from .grids import BoxField, Field, RadialField


def p_mass(d: int) -> float:
    return 2.0 + 4.0 / d


def p_energy(d: int) -> float:
    return 2.0 + 4.0 / (d - 2)


@dataclass(frozen=True)
class Regime:
    """Sign pair (mu1, mu2); first letter of the code is the L^2-critical
    sign, with F = focusing = +1."""

    mu1: int
    mu2: int

    def __post_init__(self):
        if self.mu1 not in (-1, 1) or self.mu2 not in (-1, 1):
            raise ValueError("signs must be +1 or -1")

    @property
    def code(self) -> str:
        return ("F" if self.mu1 > 0 else "D") + ("F" if self.mu2 > 0 else "D")

    @classmethod
    def from_code(cls, code: str) -> "Regime":
        code = code.strip().upper()
        if len(code) != 2 or any(ch not in "FD" for ch in code):
            raise ValueError(f"regime code must be two letters from {{F,D}}, got {code!r}")
        return cls(+1 if code[0] == "F" else -1, +1 if code[1] == "F" else -1)


FF = Regime(+1, +1)
FD = Regime(+1, -1)
DF = Regime(-1, +1)
DD = Regime(-1, -1)


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    hamiltonian: float
    virial_K: float
    functional_I: float
    hstar: float
    kc: float
    momentum: np.ndarray
    grad_norm_sq: float


def norms(u: Field) -> tuple[float, float, float, float]:
    """(mass, ||grad u||^2, ||u||_p1^p1, ||u||_p2^p2)."""
    d = u.d
    return (
        u.norm_sq(),
        u.grad_norm_sq(),
        u.lp_power(p_mass(d)),
        u.lp_power(p_energy(d)),
    )


def evaluate(u: Field, regime: Regime) -> FunctionalReport:
    d = u.d
    m, g, a, b = norms(u)
    p1, p2 = p_mass(d), p_energy(d)
    hamiltonian = 0.5 * g - regime.mu1 / p1 * a - regime.mu2 / p2 * b
    virial_K = g - regime.mu1 * d / (d + 2) * a - regime.mu2 * b
    momentum = u.momentum() if isinstance(u, BoxField) else np.zeros(d)
    return FunctionalReport(
        mass=m,
        hamiltonian=hamiltonian,
        virial_K=virial_K,
        # identity I = H - K/2 kept exact at the floating-point level
        functional_I=hamiltonian - 0.5 * virial_K,
        hstar=0.5 * g - b / p2,
        kc=g - b,
        momentum=momentum,
        grad_norm_sq=g,
    )


def _check_mass_loss(m_before: float, m_after: float, expected_ratio: float) -> None:
    if m_before <= 0:
        return
    loss = m_before * expected_ratio - m_after
    if loss > 1e-8 * m_before * expected_ratio:
        warnings.warn(
            f"rescaled field lost mass {loss:.3e} to the grid boundary",
            TruncationWarning,
            stacklevel=3,
        )


def _resample_radial(u: RadialField, lam: float, amp: float) -> RadialField:
    """Values amp * u(lam * r) on the original grid, cubic interpolation,
    zero outside the sampled range."""
    r = u.grid.nodes
    # even extension through r = 0 stabilizes the spline near the origin
    r_ext = np.concatenate([-r[2::-1], r])
    re = CubicSpline(r_ext, np.concatenate([u.values.real[2::-1], u.values.real]))
    im = CubicSpline(r_ext, np.concatenate([u.values.imag[2::-1], u.values.imag]))
    target = lam * r
    inside = target <= u.grid.r_max
    vals = np.zeros(u.grid.n, dtype=np.complex128)
    vals[inside] = amp * (re(target[inside]) + 1j * im(target[inside]))
    return RadialField(u.grid, vals)


def _resample_box(u: BoxField, lam: float, amp: float) -> BoxField:
    grid = u.grid
    ax = grid.axis
    coords = np.meshgrid(*([(lam * ax + grid.L) / grid.dx] * grid.d), indexing="ij")
    vals = amp * (
        ndimage.map_coordinates(u.values.real, coords, order=3, mode="constant")
        + 1j * ndimage.map_coordinates(u.values.imag, coords, order=3, mode="constant")
    )
    return BoxField(grid, vals)


def scale_T(u: Field, lam: float) -> Field:
    """Mass-invariant scaling (T_lam u)(x) = lam^(d/2) u(lam x)."""
    if lam <= 0:
        raise DomainError("scaling parameter must be positive")
    if lam == 1.0:
        return u
    amp = lam ** (u.d / 2.0)
    out = _resample_radial(u, lam, amp) if isinstance(u, RadialField) else _resample_box(u, lam, amp)
    _check_mass_loss(u.norm_sq(), out.norm_sq(), 1.0)
    return out


def scale_U(u: Field, lam: float) -> Field:
    """H^1-critical scaling (U_lam u)(x) = lam^((d-2)/2) u(lam x); leaves
    the kc and I functionals invariant and scales mass by lam^(-2)."""
    if lam <= 0:
        raise DomainError("scaling parameter must be positive")
    if lam == 1.0:
        return u
    amp = lam ** ((u.d - 2) / 2.0)
    out = _resample_radial(u, lam, amp) if isinstance(u, RadialField) else _resample_box(u, lam, amp)
    _check_mass_loss(u.norm_sq(), out.norm_sq(), lam**-2.0)
    return out


def symmetry_g(u: BoxField, xi: np.ndarray, x0: np.ndarray, lam: float) -> BoxField:
    """L^2 symmetry (g f)(x) = lam^(-d/2) e^(i xi.x) f((x - x0)/lam) with
    the translation wrapped periodically."""
    if not isinstance(u, BoxField):
        raise TypeError("symmetry_g acts on box fields")
    if lam <= 0:
        raise DomainError("scaling parameter must be positive")
    grid = u.grid
    xi = np.asarray(xi, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if xi.shape != (grid.d,) or x0.shape != (grid.d,):
        raise DomainError(f"xi and x0 must be {grid.d}-vectors")
    ax = grid.axis
    coords = np.meshgrid(
        *[((ax - s) / lam + grid.L) / grid.dx for s in x0], indexing="ij"
    )
    vals = lam ** (-grid.d / 2.0) * (
        ndimage.map_coordinates(u.values.real, coords, order=3, mode="grid-wrap")
        + 1j * ndimage.map_coordinates(u.values.imag, coords, order=3, mode="grid-wrap")
    )
    xs = grid.coords()
    phase = np.exp(1j * sum(c * x for c, x in zip(xi, xs)))
    return BoxField(grid, phase * vals)


def k_scaling_coefficients(u: Field, regime: Regime) -> tuple[float, float]:
    """(A, B) with K(T_lam u) = lam^2 A - mu2 lam^p2 B."""
    d = u.d
    _, g, a, b = norms(u)
    return g - regime.mu1 * d / (d + 2) * a, b


def lambda_star(
    u: Field,
    regime: Regime,
    mass_limit: float | None = None,
    method: str = "closed_form",
) -> float:
    """Unique zero of lam -> K(T_lam u).

    Exists when mu2 = +1 and A > 0; in the FF regime A > 0 is guaranteed
    for mass below the L^2-critical ground-state mass, which the caller can
    enforce by passing mass_limit.
    """
    if regime.mu2 != 1:
        raise DomainError("K(T_lam u) has no zero when the H^1-critical power is defocusing")
    d = u.d
    m, g, a, b = norms(u)
    if m == 0 or b == 0:
        raise DomainError("field must be nonzero")
    if regime.mu1 == 1:
        if mass_limit is not None and m >= mass_limit:
            raise PreconditionError(
                f"mass {m:.6g} is not below the critical mass {mass_limit:.6g}"
            )
        A = g - d / (d + 2) * a
        if A <= 0:
            raise PreconditionError(
                "kinetic term does not dominate the L^2-critical potential term; "
                "mass is too large for this profile"
            )
    else:
        A = g + d / (d + 2) * a
    closed = (A / b) ** ((d - 2) / 4.0)
    if method == "closed_form":
        return closed
    if method == "bisection":
        p2 = p_energy(d)

        def k_of_lam(lam: float) -> float:
            return lam**2 * A - lam**p2 * b

        lo = hi = 1.0
        while k_of_lam(lo) <= 0:
            lo /= 2.0
        while k_of_lam(hi) >= 0:
            hi *= 2.0
        return brentq(k_of_lam, lo, hi, xtol=1e-300, rtol=8.9e-16)
    raise ValueError(f"unknown method {method!r}")
