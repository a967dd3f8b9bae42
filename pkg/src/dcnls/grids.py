"""Discretization containers: radial grids on (0, r_max] and periodic boxes.

Radial fields live on uniformly spaced nodes r_i = i*dr, i = 1..n, and are
integrated against the measure omega_d * r^(d-1) dr with the trapezoid rule
(the r = 0 endpoint contributes nothing for d >= 3 since the integrand
vanishes there).  Box fields live on a periodic cube [-L, L)^3 sampled at
n points per axis with the usual FFT frequency lattice (pi/L) * Z^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gamma, pi

import numpy as np


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d."""
    return 2.0 * pi ** (d / 2.0) / gamma(d / 2.0)


# ---------------------------------------------------------------------------
# radial side
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    d: int
    r_max: float
    n: int

    def __post_init__(self):
        if self.d < 3:
            raise ValueError(f"need d >= 3, got d={self.d}")
        if self.n < 16:
            raise ValueError(f"need n >= 16, got n={self.n}")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")

    @property
    def dr(self) -> float:
        return self.r_max / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.dr * np.arange(1, self.n + 1)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for integration over the ball of radius r_max.

        The first node receives a full dr (half from the segment [0, dr],
        where the integrand r^(d-1)*f tends to 0, half from [dr, 2dr]);
        the last node receives dr/2.
        """
        w = np.full(self.n, self.dr)
        w[-1] = 0.5 * self.dr
        return sphere_area(self.d) * self.nodes ** (self.d - 1) * w

    def integrate(self, samples: np.ndarray) -> complex:
        return np.sum(self.weights * samples)


def _fd_weights(x, m: int) -> np.ndarray:
    """Weights w with sum w_i f(x_i) ~ f^(m)(0), from the Vandermonde system."""
    from math import factorial

    x = np.asarray(x, dtype=float)
    rhs = np.zeros(len(x))
    rhs[m] = float(factorial(m))
    return np.linalg.solve(np.vander(x, increasing=True).T, rhs)


@lru_cache(maxsize=None)
def _stencil_bank(m: int, acc: int):
    """(interior kernel, left closures, right closures) for the m-th
    derivative at accuracy acc on nodes r_i = (i+1) dr.

    Left closures use the even extension of smooth radial functions through
    r = 0 (the value at -j dr equals the sample at j dr; r = 0 itself is not
    a node and is skipped), right closures are one-sided.
    """
    half = acc // 2
    interior = _fd_weights(np.arange(-half, half + 1), m)
    npts = acc + m  # one-sided point count for the same accuracy
    left = []
    for node in range(half):
        p = node + 1  # position in dr units
        positions = [q for q in range(p - half - 1, p + half + 1) if q != 0]
        w = _fd_weights(np.asarray(positions) - p, m)
        eff = np.zeros(max(abs(q) for q in positions))
        for q, wi in zip(positions, w):
            eff[abs(q) - 1] += wi
        left.append(eff)
    right = []
    for back in range(half):  # node n-1-back
        offsets = np.arange(-(npts - 1 - back), back + 1)
        right.append(_fd_weights(offsets, m))
    return interior, left, right


def radial_derivative(
    values: np.ndarray, dr: float, order: int = 1, acc: int = 4
) -> np.ndarray:
    """Finite-difference derivative of radial samples at r_i = i*dr.

    Assumes the samples come from a smooth radial function, whose even
    extension through r = 0 supplies the left closure.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    interior, left, right = _stencil_bank(order, acc)
    v = np.asarray(values)
    half = acc // 2
    if v.size < 2 * len(interior):
        raise ValueError("too few samples for this stencil")
    out = np.empty_like(v, dtype=np.result_type(v.dtype, np.float64))
    out[half:-half] = np.convolve(v, interior[::-1], mode="valid")
    for node, w in enumerate(left):
        out[node] = w @ v[: len(w)]
    for back, w in enumerate(right):
        out[v.size - 1 - back] = w @ v[v.size - len(w) : v.size]
    return out / dr**order


@dataclass(frozen=True)
class RadialField:
    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n,):
            raise ValueError("sample count does not match grid")
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("non-finite samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return self.grid.d

    def norm_sq(self) -> float:
        return float(np.real(self.grid.integrate(np.abs(self.values) ** 2)))

    def lp_power(self, p: float) -> float:
        """Integral of |u|^p over R^d."""
        return float(np.real(self.grid.integrate(np.abs(self.values) ** p)))

    def grad_norm_sq(self) -> float:
        du = radial_derivative(self.values, self.grid.dr, order=1)
        return float(np.real(self.grid.integrate(np.abs(du) ** 2)))

    def laplacian(self, acc: int = 6) -> np.ndarray:
        """Radial Laplacian u'' + (d-1)/r u' sampled on the grid.

        Defaults to 6th order: the 1/r factor near the origin amplifies
        the first-derivative truncation error by 1/dr.
        """
        d1 = radial_derivative(self.values, self.grid.dr, order=1, acc=acc)
        d2 = radial_derivative(self.values, self.grid.dr, order=2, acc=acc)
        return d2 + (self.d - 1) / self.grid.nodes * d1


def radial_laplacian_banded(grid: RadialGrid) -> np.ndarray:
    """Second-order radial Laplacian as a (3, n) banded matrix for
    scipy.linalg.solve_banded, with a reflecting closure at r = 0
    (u'(0) = 0 via a quadratic ghost) and a Dirichlet edge at r_max."""
    n, dr, d = grid.n, grid.dr, grid.d
    r = grid.nodes
    main = np.full(n, -2.0 / dr**2)
    upper = 1.0 / dr**2 + (d - 1) / (2.0 * dr * r[:-1])
    lower = 1.0 / dr**2 - (d - 1) / (2.0 * dr * r[1:])
    # ghost at r = 0: u(0) = (4 u_1 - u_2)/3
    c0 = 1.0 / dr**2 - (d - 1) / (2.0 * dr * r[0])
    main[0] += c0 * 4.0 / 3.0
    upper[0] += -c0 / 3.0
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = main
    ab[2, :-1] = lower
    return ab


# ---------------------------------------------------------------------------
# periodic box side
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxGrid:
    d: int
    L: float
    n: int

    def __post_init__(self):
        if self.d != 3:
            raise ValueError("only d = 3 boxes are supported")
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.n < 4 or (self.n & (self.n - 1)) != 0:
            raise ValueError("n must be a power of two >= 4")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.d

    @property
    def axis(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    def coords(self) -> tuple[np.ndarray, ...]:
        ax = self.axis
        return np.meshgrid(*([ax] * self.d), indexing="ij", sparse=True)

    @property
    def freq_axis(self) -> np.ndarray:
        return 2.0 * pi * np.fft.fftfreq(self.n, d=self.dx)

    def freqs(self) -> tuple[np.ndarray, ...]:
        k = self.freq_axis
        return np.meshgrid(*([k] * self.d), indexing="ij", sparse=True)

    def freq_sq(self) -> np.ndarray:
        ks = self.freqs()
        return sum(k**2 for k in ks)


@dataclass(frozen=True)
class BoxField:
    grid: BoxGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = (self.grid.n,) * self.grid.d
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != shape:
            raise ValueError("sample shape does not match grid")
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("non-finite samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return self.grid.d

    def fft(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * self.grid.cell_volume

    def lp_power(self, p: float) -> float:
        return float(np.sum(np.abs(self.values) ** p)) * self.grid.cell_volume

    def grad_norm_sq(self) -> float:
        # Parseval: ||grad u||^2 = sum |k|^2 |u_hat|^2 / n^d * cell_volume
        uh = self.fft()
        scale = self.grid.cell_volume / self.grid.n**self.grid.d
        return float(np.sum(self.grid.freq_sq() * np.abs(uh) ** 2)) * scale

    def gradient(self) -> list[np.ndarray]:
        uh = self.fft()
        return [np.fft.ifftn(1j * k * uh) for k in self.grid.freqs()]

    def momentum(self) -> np.ndarray:
        """Im integral of conj(u) grad u, componentwise."""
        grads = self.gradient()
        vol = self.grid.cell_volume
        return np.array(
            [float(np.sum(np.imag(np.conj(self.values) * g))) * vol for g in grads]
        )


Field = RadialField | BoxField
