"""Time evolution of the double-power equation

    i u_t + Lap u + mu1 |u|^(4/d) u + mu2 |u|^(4/(d-2)) u = 0

on a periodic box (Strang split-step with exact nonlinear phase and
spectral free flow) or on a radial grid (Crank-Nicolson for the linear
flow inside the same splitting).  The module also carries the local
virial diagnostics, the Galilean-covariance test, blow-up/scattering
classification and the regime-specific lower bounds on the virial
functional along the flow.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, PreconditionError, SolverError
from .functionals import FF, Regime, evaluate, p_energy, p_mass
from .grids import (
    BoxField,
    BoxGrid,
    Field,
    RadialField,
    RadialGrid,
    radial_derivative,
    radial_laplacian_banded,
)
from .ground_states import critical_mass, hstar_w


# ---------------------------------------------------------------------------
# configuration and result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdaptConfig:
    """Blow-up time-step controller: dt is divided by 2^ceil(2 log2 gamma)
    where gamma is the H^1-seminorm growth factor, so dt ~ gamma^(-2)."""

    growth_blowup: float = 10.0   # gradient growth flagging blow-up ...
    collapse_factor: float = 1024.0  # ... together with dt <= dt0/this
    abort_factor: float = 4096.0  # stop integrating below dt0/this


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    scheme: str = "strang"  # "strang" (box) | "crank_nicolson" (radial)
    dealias: bool = True
    adapt: AdaptConfig | None = None
    checkpoint_every: int = 10  # steps between series entries
    store_fields: str = "window"  # "none" | "window" | "all"
    virial_radius: float | None = None  # default: quarter of the domain

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.t_end <= 0:
            raise DomainError("t_end must be positive")
        if self.scheme not in ("strang", "crank_nicolson"):
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if self.store_fields not in ("none", "window", "all"):
            raise DomainError(f"unknown store_fields {self.store_fields!r}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    series: dict
    snapshot_times: tuple
    snapshots: tuple
    meta: dict

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("checkpoint times must increase")
        lens = {len(v) for v in self.series.values()}
        if lens != {len(self.times)}:
            raise ValueError("series lengths must match the checkpoint count")


@dataclass(frozen=True)
class Classification:
    verdict: str  # "blow_up" | "scatter_proxy" | "undecided"
    evidence: dict


# ---------------------------------------------------------------------------
# smooth virial cutoff
# ---------------------------------------------------------------------------

def _hermite_nonic() -> np.ndarray:
    """Coefficients (highest power first) of the degree-9 polynomial on
    [1, 2] matching q^2 to fourth order at q = 1 and vanishing to fourth
    order at q = 2.  Fourth-order matching keeps the bi-Laplacian of the
    cutoff free of surface layers on the matching spheres, which the
    pointwise virial identity requires."""
    a = np.zeros((10, 10))
    rhs = np.array([1.0, 2.0, 2.0, 0.0, 0.0] + [0.0] * 5)
    conds = [(1.0, m) for m in range(5)] + [(2.0, m) for m in range(5)]
    for i, (q, order) in enumerate(conds):
        for k in range(10):
            if k >= order:
                fac = 1.0
                for j in range(order):
                    fac *= k - j
                a[i, k] = fac * q ** (k - order)
    coef = np.linalg.solve(a, rhs)
    return coef[::-1]


_RHO_COEF = _hermite_nonic()


def chi_profile(q: np.ndarray, deriv: int = 0) -> np.ndarray:
    """Radial profile rho of the virial cutoff chi(y) = rho(|y|):
    rho(q) = q^2 for q <= 1, 0 for q >= 2, C^4 polynomial interpolation
    between.  deriv selects d^k rho / dq^k for k = 0..4."""
    if deriv not in range(5):
        raise DomainError("deriv must be 0..4")
    q = np.asarray(q, dtype=float)
    out = np.zeros_like(q)
    inner = q <= 1.0
    if deriv == 0:
        out[inner] = q[inner] ** 2
    elif deriv == 1:
        out[inner] = 2.0 * q[inner]
    elif deriv == 2:
        out[inner] = 2.0
    mid = (q > 1.0) & (q < 2.0)
    out[mid] = np.polyval(np.polyder(np.poly1d(_RHO_COEF), deriv), q[mid])
    return out


def _virial_radius(u: Field, R: float | None) -> float:
    if isinstance(u, BoxField):
        limit = u.grid.L / 2.0
    else:
        limit = u.grid.r_max / 2.0
    if R is None:
        return limit / 2.0
    if R <= 0 or 2.0 * R > 2.0 * limit:
        raise DomainError(
            f"cutoff support 2R = {2 * R:.4g} exceeds the domain half-width"
        )
    return float(R)


def local_virial(u: Field, R: float | None = None) -> tuple[float, float]:
    """(z_R, dz_R): truncated second moment int R^2 chi(x/R) |u|^2 and its
    time derivative 2 Im int R grad chi(x/R) . grad u conj(u)."""
    R = _virial_radius(u, R)
    if isinstance(u, RadialField):
        q = u.grid.nodes / R
        z = R**2 * float(np.real(u.grid.integrate(chi_profile(q) * np.abs(u.values) ** 2)))
        du = radial_derivative(u.values, u.grid.dr)
        dz = 2.0 * R * float(
            np.real(u.grid.integrate(chi_profile(q, 1) * np.imag(np.conj(u.values) * du)))
        )
        return z, dz
    xs = u.grid.coords()
    r = np.sqrt(sum(x**2 for x in xs))
    q = r / R
    vol = u.grid.cell_volume
    z = R**2 * float(np.sum(chi_profile(q) * np.abs(u.values) ** 2)) * vol
    rho1 = chi_profile(q, 1)
    grads = u.gradient()
    rsafe = np.where(r > 0, r, 1.0)
    dz = 0.0
    for x, g in zip(xs, grads):
        dz += float(np.sum(rho1 * x / rsafe * np.imag(np.conj(u.values) * g))) * vol
    return z, 2.0 * R * dz


def virial_rhs(u: Field, regime: Regime | None, R: float | None = None) -> float:
    """8 K(u) + A_R(u): the exact second time derivative of z_R.  With the
    potentials disabled (regime None) K degenerates to ||grad u||^2."""
    R = _virial_radius(u, R)
    mus = (0.0, 0.0) if regime is None else (float(regime.mu1), float(regime.mu2))
    if regime is None:
        k = u.grad_norm_sq()
    else:
        k = evaluate(u, regime).virial_K
    return 8.0 * k + _a_r_term(u, mus, R)


def _a_r_term(u: Field, mus: tuple[float, float], R: float) -> float:
    """Error term A_R: every contribution is supported on |x| >= R where
    the cutoff departs from |x|^2."""
    d = u.d
    mu1, mu2 = mus
    p1, p2 = p_mass(d), p_energy(d)
    if isinstance(u, RadialField):
        r = u.grid.nodes
        q = r / R
        rho = [chi_profile(q, k) for k in range(5)]
        du = radial_derivative(u.values, u.grid.dr)
        kin = 4.0 * (rho[2] - 2.0) * np.abs(du) ** 2
        lap2 = (
            rho[4]
            + 2.0 * (d - 1) * rho[3] / q
            + (d - 1) * (d - 3) * rho[2] / q**2
            - (d - 1) * (d - 3) * rho[1] / q**3
        )
        lapchi = rho[2] + (d - 1) * rho[1] / q
        dens = (
            kin
            - lap2 / R**2 * np.abs(u.values) ** 2
            - mu1 * 4.0 / (d + 2.0) * (lapchi - 2.0 * d) * np.abs(u.values) ** p1
            - mu2 * 4.0 / d * (lapchi - 2.0 * d) * np.abs(u.values) ** p2
        )
        return float(np.real(u.grid.integrate(dens)))
    xs = u.grid.coords()
    r = np.sqrt(sum(x**2 for x in xs))
    q = r / R
    rho = [chi_profile(q, k) for k in range(5)]
    rsafe = np.where(r > 0, r, 1.0)
    qsafe = np.where(q > 0, q, 1.0)
    grads = u.gradient()
    # sum_jk d2chi_jk Re(d_j u d_k conj(u)) - 2 |grad u|^2, with
    # d2chi_jk = rho'' yhat yhat + rho'/q (delta - yhat yhat)
    radial_part = sum(x / rsafe * g for x, g in zip(xs, grads))
    gradsq = sum(np.abs(g) ** 2 for g in grads)
    contracted = (
        rho[2] * np.abs(radial_part) ** 2
        + rho[1] / qsafe * (gradsq - np.abs(radial_part) ** 2)
    )
    kin = 4.0 * (contracted - 2.0 * gradsq)
    lap2 = (
        rho[4]
        + 2.0 * (d - 1) * rho[3] / qsafe
        + (d - 1) * (d - 3) * rho[2] / qsafe**2
        - (d - 1) * (d - 3) * rho[1] / qsafe**3
    )
    lap2 = np.where(q <= 1.0, 0.0, lap2)
    lapchi = np.where(q <= 1.0, 2.0 * d, rho[2] + (d - 1) * rho[1] / qsafe)
    absu = np.abs(u.values)
    dens = (
        kin
        - lap2 / R**2 * absu**2
        - mu1 * 4.0 / (d + 2.0) * (lapchi - 2.0 * d) * absu**p1
        - mu2 * 4.0 / d * (lapchi - 2.0 * d) * absu**p2
    )
    return float(np.sum(dens)) * u.grid.cell_volume


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

def _nonlinear_phase(values: np.ndarray, dt: float, regime: Regime | None, d: int):
    if regime is None:
        return values
    absu = np.abs(values)
    phase = regime.mu1 * absu ** (4.0 / d) + regime.mu2 * absu ** (4.0 / (d - 2))
    return np.exp(1j * dt * phase) * values


def _dealias_mask(grid: BoxGrid) -> np.ndarray:
    k = np.abs(np.fft.fftfreq(grid.n)) <= 1.0 / 3.0
    kx, ky, kz = np.meshgrid(k, k, k, indexing="ij", sparse=True)
    return kx & ky & kz


class _BoxStepper:
    def __init__(self, grid: BoxGrid, regime: Regime | None, dealias: bool):
        self.grid = grid
        self.regime = regime
        self.ksq = grid.freq_sq()
        self.mask = _dealias_mask(grid) if dealias else None
        self._dt = None
        self._mult = None

    def step(self, values: np.ndarray, dt: float) -> tuple[np.ndarray, float]:
        """One Strang step; returns (new values, ||grad u||^2 by Parseval)."""
        if dt != self._dt:
            self._mult = np.exp(-1j * dt * self.ksq)
            if self.mask is not None:
                self._mult = self._mult * self.mask
            self._dt = dt
        v = _nonlinear_phase(values, 0.5 * dt, self.regime, self.grid.d)
        vh = np.fft.fftn(v)
        vh *= self._mult
        scale = self.grid.cell_volume / self.grid.n**self.grid.d
        gradsq = float(np.sum(self.ksq * np.abs(vh) ** 2)) * scale
        v = np.fft.ifftn(vh)
        return _nonlinear_phase(v, 0.5 * dt, self.regime, self.grid.d), gradsq


class _RadialStepper:
    def __init__(self, grid: RadialGrid, regime: Regime | None):
        self.grid = grid
        self.regime = regime
        self.lap = radial_laplacian_banded(grid)
        self._dt = None
        self._ab = None

    def step(self, values: np.ndarray, dt: float) -> tuple[np.ndarray, float]:
        """Strang step with Crank-Nicolson for the linear flow."""
        if dt != self._dt:
            ab = -0.5j * dt * self.lap.astype(np.complex128)
            ab[1, :] += 1.0
            self._ab = ab
            self._dt = dt
        v = _nonlinear_phase(values, 0.5 * dt, self.regime, self.grid.d)
        rhs = v + 0.5j * dt * _apply_banded(self.lap, v)
        v = solve_banded((1, 1), self._ab, rhs)
        v = _nonlinear_phase(v, 0.5 * dt, self.regime, self.grid.d)
        du = radial_derivative(v, self.grid.dr)
        gradsq = float(np.real(self.grid.integrate(np.abs(du) ** 2)))
        return v, gradsq


def _apply_banded(ab: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = ab[1, :] * v
    out[:-1] += ab[0, 1:] * v[1:]
    out[1:] += ab[2, :-1] * v[:-1]
    return out


# ---------------------------------------------------------------------------
# evolution driver
# ---------------------------------------------------------------------------

_SERIES_KEYS = (
    "mass", "hamiltonian", "virial_K", "grad_norm", "z_R", "dz_R",
    "virial_rhs", "lq_mass_crit", "lq_energy_crit",
)


def evolve(u0: Field, regime: Regime | None, cfg: SolverConfig) -> Trajectory:
    """Integrate the equation from u0 to t_end.

    regime = None disables both potentials (free flow), used by linearity
    checks.  With cfg.adapt set, the step shrinks as the gradient grows and
    the run aborts with a partial, blow-up-suspected trajectory once the
    step has collapsed by the configured factor.
    """
    if isinstance(u0, BoxField):
        if cfg.scheme != "strang":
            raise DomainError("box evolution uses the strang scheme")
        stepper = _BoxStepper(u0.grid, regime, cfg.dealias)
    elif isinstance(u0, RadialField):
        if cfg.scheme != "crank_nicolson":
            raise DomainError("radial evolution uses the crank_nicolson scheme")
        stepper = _RadialStepper(u0.grid, regime)
    else:
        raise TypeError(f"cannot evolve {type(u0).__name__}")

    R = _virial_radius(u0, cfg.virial_radius)
    d = u0.d
    make = type(u0)
    grid = u0.grid

    g0 = u0.grad_norm_sq()
    dt0 = cfg.dt
    dt = dt0
    t = 0.0
    vals = u0.values
    times, rows = [], {k: [] for k in _SERIES_KEYS}
    rows["momentum"] = []
    snap_t, snaps = [], []
    window_start = 0.75 * cfg.t_end
    aborted = False
    growth = 1.0
    wraparound = False

    def checkpoint(t_now, vals_now):
        nonlocal wraparound
        u = make(grid, vals_now)
        rep = evaluate(u, regime if regime is not None else FF)
        times.append(t_now)
        rows["mass"].append(rep.mass)
        if regime is None:
            rows["hamiltonian"].append(0.5 * rep.grad_norm_sq)
            rows["virial_K"].append(rep.grad_norm_sq)
        else:
            rows["hamiltonian"].append(rep.hamiltonian)
            rows["virial_K"].append(rep.virial_K)
        rows["virial_rhs"].append(virial_rhs(u, regime, R))
        rows["grad_norm"].append(np.sqrt(rep.grad_norm_sq))
        rows["momentum"].append(rep.momentum)
        z, dz = local_virial(u, R)
        rows["z_R"].append(z)
        rows["dz_R"].append(dz)
        rows["lq_mass_crit"].append(u.lp_power(2.0 * (d + 2) / d) ** (d / (2.0 * (d + 2))))
        rows["lq_energy_crit"].append(
            u.lp_power(2.0 * (d + 2) / (d - 2)) ** ((d - 2) / (2.0 * (d + 2)))
        )
        if isinstance(u, BoxField) and rep.mass > 0:
            xs = grid.coords()
            outside = sum(x**2 for x in xs) > (grid.L / 2.0) ** 2
            out_mass = float(np.sum(np.abs(vals_now[outside]) ** 2)) * grid.cell_volume
            if out_mass > 1e-6 * rep.mass:
                wraparound = True
        keep = cfg.store_fields == "all" or (
            cfg.store_fields == "window" and (t_now == 0.0 or t_now >= window_start)
        )
        if keep:
            snap_t.append(t_now)
            snaps.append(u)

    checkpoint(0.0, vals)
    steps_since = 0
    while t < cfg.t_end - 1e-12 * cfg.t_end:
        dt_step = min(dt, cfg.t_end - t)
        vals_new, g = stepper.step(vals, dt_step)
        if not np.all(np.isfinite(vals_new.view(np.float64))):
            aborted = True
            break
        vals = vals_new
        t += dt_step
        steps_since += 1
        if cfg.adapt is not None and g0 > 0:
            growth = max(growth, np.sqrt(g / g0))
            level = max(0, int(np.ceil(2.0 * np.log2(max(growth, 1.0)))))
            dt = dt0 / 2.0**level
            if dt < dt0 / cfg.adapt.abort_factor:
                aborted = True
                checkpoint(t, vals)
                break
        if steps_since >= cfg.checkpoint_every or t >= cfg.t_end - 1e-12 * cfg.t_end:
            checkpoint(t, vals)
            steps_since = 0

    series = {k: np.array(v) for k, v in rows.items()}
    meta = {
        "dt0": dt0,
        "final_dt": dt,
        "growth_factor": growth,
        "aborted": aborted,
        "blow_up_suspected": aborted,
        "wraparound": wraparound,
        "virial_radius": R,
        "regime": regime.code if regime is not None else "linear",
        "scheme": cfg.scheme,
        "t_end": cfg.t_end,
    }
    return Trajectory(
        times=np.array(times), series=series,
        snapshot_times=tuple(snap_t), snapshots=tuple(snaps), meta=meta,
    )


def free_evolve(u: BoxField, t: float) -> BoxField:
    """Exact free flow e^(i t Lap) u on the box."""
    if not isinstance(u, BoxField):
        raise TypeError("free_evolve needs a box field")
    uh = u.fft()
    return BoxField(u.grid, np.fft.ifftn(np.exp(-1j * t * u.grid.freq_sq()) * uh))


# ---------------------------------------------------------------------------
# diagnostics on trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConservationReport:
    mass_drift: float
    energy_drift: float
    momentum_drift: float


def conservation_report(traj: Trajectory) -> ConservationReport:
    """Max relative drift of mass and Hamiltonian, absolute of momentum."""
    if len(traj.times) == 0:
        raise PreconditionError("empty trajectory")
    m = traj.series["mass"]
    h = traj.series["hamiltonian"]
    p = np.asarray(traj.series["momentum"])
    m_drift = float(np.max(np.abs(m - m[0]))) / max(abs(m[0]), 1e-300)
    h_drift = float(np.max(np.abs(h - h[0]))) / max(abs(h[0]), 1e-300)
    p_drift = float(np.max(np.abs(p - p[0])))
    return ConservationReport(m_drift, h_drift, p_drift)


@dataclass(frozen=True)
class GalileanReport:
    xi: np.ndarray
    h1_mismatch: float
    boost_energy_residual: float


def boost(u: BoxField, xi: np.ndarray) -> BoxField:
    xs = u.grid.coords()
    phase = np.exp(1j * sum(x * s for x, s in zip(xs, xi)))
    return BoxField(u.grid, phase * u.values)


def _check_lattice_xi(grid: BoxGrid, xi: np.ndarray) -> None:
    base = np.pi / grid.L
    ratio = np.asarray(xi, dtype=float) / base
    if np.max(np.abs(ratio - np.round(ratio))) > 1e-9:
        raise DomainError(
            f"xi must sit on the frequency lattice (multiples of {base:.6g})"
        )


def galilean_test(
    u0: BoxField, xi: np.ndarray, regime: Regime | None, cfg: SolverConfig
) -> GalileanReport:
    """Evolve boosted data and compare against the boosted evolution of the
    original: u_xi(t, x) = e^(i xi.x - i t |xi|^2) u(t, x - 2 xi t)."""
    xi = np.asarray(xi, dtype=float)
    _check_lattice_xi(u0.grid, xi)
    t = cfg.t_end

    traj_boost = evolve(boost(u0, xi), regime, replace(cfg, store_fields="window"))
    traj_plain = evolve(u0, regime, replace(cfg, store_fields="window"))
    u_b = traj_boost.snapshots[-1]
    u_p = traj_plain.snapshots[-1]

    # translate by 2 xi t with the exact spectral shift, then boost and phase
    uh = u_p.fft()
    ks = u_p.grid.freqs()
    shift = np.exp(-1j * sum(k * (2.0 * s * t) for k, s in zip(ks, xi)))
    translated = BoxField(u_p.grid, np.fft.ifftn(uh * shift))
    expected = BoxField(
        u_p.grid,
        np.exp(-1j * t * float(xi @ xi)) * boost(translated, xi).values,
    )
    diff = BoxField(u_p.grid, u_b.values - expected.values)
    h1 = np.sqrt(diff.norm_sq() + diff.grad_norm_sq())

    rep0 = evaluate(u0, regime if regime is not None else FF)
    repb = evaluate(boost(u0, xi), regime if regime is not None else FF)
    h0 = rep0.hamiltonian if regime is not None else 0.5 * rep0.grad_norm_sq
    hb = repb.hamiltonian if regime is not None else 0.5 * repb.grad_norm_sq
    predicted = h0 + 0.5 * float(xi @ xi) * rep0.mass + float(xi @ rep0.momentum)
    residual = abs(hb - predicted) / max(abs(hb), 1.0)
    return GalileanReport(xi=xi, h1_mismatch=float(h1), boost_energy_residual=residual)


def virial_identity_check(traj: Trajectory, R: float | None = None) -> float:
    """Sup-norm residual of the identity d2/dt2 z_R = 8 K + A_R over the
    interior checkpoints, using a centered second difference of z_R."""
    if R is not None and abs(R - traj.meta["virial_radius"]) > 1e-12 * R:
        raise DomainError(
            "trajectory was recorded at R = "
            f"{traj.meta['virial_radius']:.6g}; re-run evolve with virial_radius=R"
        )
    t = traj.times
    if len(t) < 3:
        raise PreconditionError("need at least three checkpoints")
    z = traj.series["z_R"]
    rhs = traj.series["virial_rhs"]
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    zpp = 2.0 * (
        z[:-2] / (h0 * (h0 + h1)) - z[1:-1] / (h0 * h1) + z[2:] / (h1 * (h0 + h1))
    )
    if np.max(np.maximum(h0, h1)) > 0.05:
        warnings.warn(
            "checkpoint spacing above 0.05: the second difference of z_R "
            "may dominate the residual",
            UserWarning,
            stacklevel=2,
        )
    return float(np.max(np.abs(zpp - rhs[1:-1])))


# ---------------------------------------------------------------------------
# classification and scans
# ---------------------------------------------------------------------------

def classify(
    u0: Field,
    regime: Regime | None,
    cfg: SolverConfig,
    m_threshold: float | None = None,
    eps_scatter: float = 1e-2,
) -> Classification:
    """Dichotomy verdict after an adaptive run.

    blow_up needs the gradient-growth and step-collapse symptoms together;
    scatter_proxy needs small space-time norms over the final quarter of
    the horizon and a shrinking H^1 distance to the free evolution fitted
    at the final time.  Anything else is undecided.
    """
    if cfg.adapt is None:
        cfg = replace(cfg, adapt=AdaptConfig())
    cfg = replace(cfg, store_fields="window")
    traj = evolve(u0, regime, cfg)
    adapt = cfg.adapt
    growth = traj.meta["growth_factor"]
    collapsed = traj.meta["final_dt"] <= cfg.dt / adapt.collapse_factor

    evidence = {
        "growth_factor": growth,
        "dt_ratio": traj.meta["final_dt"] / cfg.dt,
        "aborted": traj.meta["aborted"],
        "wraparound": traj.meta["wraparound"],
    }
    if regime is not None and m_threshold is not None:
        rep = evaluate(u0, regime)
        evidence["below_threshold"] = bool(rep.hamiltonian < m_threshold)

    if growth >= adapt.growth_blowup and collapsed:
        return Classification("blow_up", evidence)

    window = traj.times >= 0.75 * cfg.t_end
    if not np.any(window) or traj.meta["aborted"]:
        return Classification("undecided", evidence)
    w1 = traj.series["lq_mass_crit"][window]
    w2 = traj.series["lq_energy_crit"][window]
    ref1 = traj.series["lq_mass_crit"][0]
    ref2 = traj.series["lq_energy_crit"][0]
    tail = max(
        float(np.max(w1)) / max(ref1, 1e-300),
        float(np.max(w2)) / max(ref2, 1e-300),
    )
    evidence["tail_strichartz"] = tail

    h1_dist = None
    if isinstance(u0, BoxField) and len(traj.snapshots) > 1:
        u_end = traj.snapshots[-1]
        t_end = traj.snapshot_times[-1]
        phi_plus = free_evolve(u_end, -t_end)
        dists = []
        for t_i, u_i in zip(traj.snapshot_times, traj.snapshots):
            if t_i < 0.75 * cfg.t_end:
                continue
            free_i = free_evolve(phi_plus, t_i)
            diff = BoxField(u0.grid, u_i.values - free_i.values)
            dists.append(np.sqrt(diff.norm_sq() + diff.grad_norm_sq()))
        h1_dist = np.array(dists)
        evidence["h1_free_distance"] = h1_dist

    decreasing = h1_dist is not None and len(h1_dist) >= 2 and bool(
        np.all(np.diff(h1_dist) <= 1e-9 * max(h1_dist[0], 1e-300))
    )
    if tail < eps_scatter and decreasing:
        return Classification("scatter_proxy", evidence)
    return Classification("undecided", evidence)


@dataclass(frozen=True)
class ThresholdScanReport:
    critical_amp: float
    k_sign_amp: float | None
    h_threshold_amp: float | None
    verdicts: tuple


def threshold_scan(
    family,
    amp_lo: float,
    amp_hi: float,
    regime: Regime,
    cfg: SolverConfig,
    curve=None,
    n_bisect: int = 8,
    eps_scatter: float = 1e-2,
) -> ThresholdScanReport:
    """Bisect the amplitude between a scattering and a blow-up verdict.

    family(amp) -> Field must be monotone in amplitude.  Alongside the
    empirical critical amplitude the report carries the amplitude where
    K(u0) changes sign and, when an m_c curve is supplied, the one where
    H(u0) crosses m_{M(u0)}.
    """
    from scipy.optimize import brentq

    def verdict(amp):
        m = None
        if curve is not None:
            try:
                m = curve.interpolate(evaluate(family(amp), regime).mass)
            except DomainError:
                m = None
        return classify(
            family(amp), regime, cfg, m_threshold=m, eps_scatter=eps_scatter
        ).verdict

    v_lo, v_hi = verdict(amp_lo), verdict(amp_hi)
    verdicts = [(amp_lo, v_lo), (amp_hi, v_hi)]
    if v_lo == v_hi or v_lo == "blow_up" or v_hi != "blow_up":
        raise SolverError(
            f"amplitude endpoints do not bracket: {v_lo} at {amp_lo:.4g}, "
            f"{v_hi} at {amp_hi:.4g}"
        )
    lo, hi = amp_lo, amp_hi
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        v = verdict(mid)
        verdicts.append((mid, v))
        if v == "blow_up":
            hi = mid
        else:
            lo = mid
    critical = 0.5 * (lo + hi)

    def k_of(amp):
        return evaluate(family(amp), regime).virial_K

    k_amp = None
    if k_of(amp_lo) * k_of(amp_hi) < 0:
        k_amp = float(brentq(k_of, amp_lo, amp_hi, rtol=1e-10))

    h_amp = None
    if curve is not None:

        def h_gap(amp):
            rep = evaluate(family(amp), regime)
            return rep.hamiltonian - curve.interpolate(rep.mass)

        if h_gap(amp_lo) * h_gap(amp_hi) < 0:
            h_amp = float(brentq(h_gap, amp_lo, amp_hi, rtol=1e-10))
    return ThresholdScanReport(
        critical_amp=critical, k_sign_amp=k_amp, h_threshold_amp=h_amp,
        verdicts=tuple(verdicts),
    )


@dataclass(frozen=True)
class KLowerBoundReport:
    bound: float
    min_K: float
    holds: bool


def k_lower_bound_check(
    traj: Trajectory, regime: Regime, m_threshold: float | None = None
) -> KLowerBoundReport:
    """Verify the regime's lower bound on inf_t K(u(t)) over checkpoints.

    m_threshold is m_{M(u0)} for the doubly focusing regime (interpolated
    from a threshold curve by the caller).
    """
    d = None
    for u in traj.snapshots:
        d = u.d
        break
    if d is None:
        d = 3
    m0 = traj.series["mass"][0]
    h0 = traj.series["hamiltonian"][0]
    k0 = traj.series["virial_K"][0]
    if m0 <= 0:
        raise PreconditionError("admissible data has positive mass")
    if regime == FF:
        mq = critical_mass(d)
        if m0 >= mq:
            raise PreconditionError(f"mass {m0:.6g} is not below M(Q) = {mq:.6g}")
        if m_threshold is None:
            raise PreconditionError("the doubly focusing bound needs m_{M(u0)}")
        if not (k0 > 0 and h0 < m_threshold):
            raise PreconditionError(
                "data is outside the admissible set: needs K > 0 and H < m_c"
            )
        delta = 1.0 - (m0 / mq) ** (2.0 / d)
        bound = min(
            4.0 * delta / d * h0,
            ((d / (delta * (d - 2.0))) ** ((d - 2.0) / 4.0) - 1.0) ** -1.0
            * (m_threshold - h0),
        )
    elif regime.mu1 == -1 and regime.mu2 == 1:  # DF
        if not (h0 < hstar_w(d) and k0 >= 0):
            raise PreconditionError(
                "data is outside the admissible set: needs K >= 0 and H < H*(W)"
            )
        bound = min(
            4.0 / d * h0,
            ((d / (d - 2.0)) ** ((d - 2.0) / 4.0) - 1.0) ** -1.0
            * (hstar_w(d) - h0),
        )
    elif regime.mu1 == 1 and regime.mu2 == -1:  # FD
        if m0 >= critical_mass(d):
            raise PreconditionError("admissible mass must stay below M(Q)")
        bound = 2.0 * h0
    else:
        raise DomainError("no virial lower bound is stated for the doubly defocusing regime")
    min_k = float(np.min(traj.series["virial_K"]))
    return KLowerBoundReport(bound=bound, min_K=min_k, holds=bool(min_k >= bound - 1e-9 * abs(bound)))
