"""Mass-energy indicator: a scalar D(c, h) that is conserved along the flow,
monotone in (mass, energy), and blows up as the pair approaches the boundary
of the admissible region.  The admissible region in the (c, h) plane depends
on the sign regime:

    FF:  0 <= c < M(Q) and h below the threshold curve m_c
    DF:  h < H*(W) (no mass constraint)
    FD:  c < M(Q) (no energy constraint)
    DD:  everything (the indicator degenerates to h itself)

Inside the region D = h + (h + c) / dist((c, h), complement); outside it is
infinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .functionals import DD, DF, FD, FF, Regime, evaluate
from .grids import Field


@dataclass(frozen=True)
class MEIRegion:
    """Admissible region data.  For FF the boundary curve is a sampled
    (c, m_c) polyline; the known endpoint limits m_c -> H*(W) as c -> 0 and
    m_c -> 0 as c -> M(Q) are appended as anchors so the polyline spans the
    whole mass range."""

    regime: Regime
    m_crit: float | None = None       # M(Q), FF and FD
    h_crit: float | None = None       # H*(W), DF and the FF left endpoint
    curve_c: np.ndarray | None = None  # FF threshold curve samples
    curve_h: np.ndarray | None = None

    def __post_init__(self):
        code = self.regime.code
        if code == "FF":
            if self.m_crit is None or self.h_crit is None:
                raise PreconditionError("FF region needs M(Q) and H*(W)")
            if self.curve_c is None or self.curve_h is None:
                raise PreconditionError("FF region needs a sampled threshold curve")
            c = np.concatenate([[0.0], np.asarray(self.curve_c, float), [self.m_crit]])
            h = np.concatenate([[self.h_crit], np.asarray(self.curve_h, float), [0.0]])
            if np.any(np.diff(c) <= 0):
                raise DomainError("curve samples must be strictly increasing in mass")
            object.__setattr__(self, "curve_c", c)
            object.__setattr__(self, "curve_h", h)
        elif code == "DF":
            if self.h_crit is None:
                raise PreconditionError("DF region needs H*(W)")
        elif code == "FD":
            if self.m_crit is None:
                raise PreconditionError("FD region needs M(Q)")

    # -- membership -------------------------------------------------------

    def mc_at(self, c: float) -> float:
        """Linear interpolation of the FF boundary curve."""
        if self.regime.code != "FF":
            raise DomainError("threshold curve only exists in the FF regime")
        if not (0.0 <= c <= self.m_crit):
            raise DomainError(f"mass {c:.6g} outside the sampled range")
        return float(np.interp(c, self.curve_c, self.curve_h))

    def contains(self, c: float, h: float) -> bool:
        code = self.regime.code
        if code == "FF":
            return c < self.m_crit and (c < 0.0 or h < self.mc_at(c))
        if code == "DF":
            return c < 0.0 or h < self.h_crit
        if code == "FD":
            return c < self.m_crit
        return True

    # -- distance to the complement ---------------------------------------

    def boundary_distance(self, c: float, h: float) -> float:
        code = self.regime.code
        if code == "FF":
            # nearest of: the half-plane c >= M(Q) and the region above the
            # curve {0 <= c' < M(Q), h' >= m_c'}, whose boundary is the
            # sampled polyline plus the vertical ray above (0, H*(W))
            best = self.m_crit - c
            for i in range(len(self.curve_c) - 1):
                a = (self.curve_c[i], self.curve_h[i])
                b = (self.curve_c[i + 1], self.curve_h[i + 1])
                best = min(best, _segment_distance(c, h, a, b))
            best = min(best, _ray_up_distance(c, h, 0.0, self.h_crit))
            return best
        if code == "DF":
            # complement is the quadrant [0, inf) x [H*, inf)
            if c >= 0.0:
                return self.h_crit - h
            # c < 0: nearest point of the quadrant is (0, max(h, H*))
            return float(np.hypot(c, max(self.h_crit - h, 0.0)))
        if code == "FD":
            return self.m_crit - c
        return np.inf


def _segment_distance(px: float, py: float, a, b) -> float:
    ax, ay = a
    bx, by = b
    vx, vy = bx - ax, by - ay
    t = ((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy)
    t = min(1.0, max(0.0, t))
    return float(np.hypot(px - (ax + t * vx), py - (ay + t * vy)))


def _ray_up_distance(px: float, py: float, x: float, y0: float) -> float:
    """Distance to the vertical ray {(x, y): y >= y0}."""
    return float(np.hypot(px - x, max(y0 - py, 0.0)))


# ---------------------------------------------------------------------------
# the indicator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MEIValue:
    value: float
    distance: float


def mei_value(c: float, h: float, region: MEIRegion) -> MEIValue:
    if not region.contains(c, h):
        return MEIValue(value=np.inf, distance=0.0)
    dist = region.boundary_distance(c, h)
    if np.isinf(dist):
        return MEIValue(value=h, distance=dist)
    return MEIValue(value=h + (h + c) / dist, distance=dist)


def mei_of(u: Field, region: MEIRegion) -> MEIValue:
    rep = evaluate(u, region.regime)
    return mei_value(rep.mass, rep.hamiltonian, region)


def fd_closed_form(c: float, h: float, m_crit: float) -> float:
    """FD indicator in closed form: the complement is the half-plane
    c >= M(Q), so the distance is just M(Q) - c."""
    if c >= m_crit:
        return np.inf
    return h + (h + c) / (m_crit - c)


# ---------------------------------------------------------------------------
# admissibility and the geometric properties
# ---------------------------------------------------------------------------

def admissible(u: Field, region: MEIRegion) -> bool:
    """Membership in the admissible set of fields for the regime:

    FF: M < M(Q), H < m_M and K > 0; DF: H < H*(W) and K > 0;
    FD: 0 < M < M(Q); DD: any nonzero field.
    """
    rep = evaluate(u, region.regime)
    code = region.regime.code
    if code == "FF":
        return (
            rep.mass < region.m_crit
            and rep.hamiltonian < region.mc_at(rep.mass)
            and rep.virial_K > 0
        )
    if code == "DF":
        return rep.hamiltonian < region.h_crit and rep.virial_K > 0
    if code == "FD":
        return 0.0 < rep.mass < region.m_crit
    return rep.mass > 0


@dataclass(frozen=True)
class MEIPropertyReport:
    n_fields: int
    n_pairs: int
    zero_violations: int       # (i): D = 0 only for the zero field
    membership_violations: int  # (ii): 0 < D < inf <=> admissible
    order_violations: int      # (iv): monotone in (M, H) with strictness
    grad_ratio_range: tuple[float, float]   # (v): ||grad u||^2 / H(u)
    h1_ratio_range: tuple[float, float]     # (v): ||u||_H1^2 / D(u)
    min_curve_gap: float       # (vi): inf |H(u) - m_M(u)| over the sublevel

    @property
    def ok(self) -> bool:
        return (
            self.zero_violations == 0
            and self.membership_violations == 0
            and self.order_violations == 0
        )


def mei_properties_check(
    region: MEIRegion, fields: list[Field], d_cap: float | None = None
) -> MEIPropertyReport:
    """Check the geometric properties of D on evaluated sample fields.

    (i) D(u) = 0 exactly for the zero field; (ii) D finite and positive
    exactly on the admissible set; (iv) D ordered whenever mass and energy
    are both ordered, strictly if either is strict.  (v) and (vi) are
    reported as observed ranges over the D <= d_cap sublevel rather than
    pass/fail, since the lemma constants are not explicit.
    """
    reps = [evaluate(u, region.regime) for u in fields]
    vals = [mei_value(r.mass, r.hamiltonian, region) for r in reps]
    adm = [admissible(u, region) for u in fields]

    zero_bad = 0
    member_bad = 0
    for u, r, v, a in zip(fields, reps, vals, adm):
        is_zero = r.mass == 0.0
        if (v.value == 0.0) != is_zero:
            zero_bad += 1
        if (0.0 < v.value < np.inf) != (a and not is_zero):
            member_bad += 1

    order_bad = 0
    n_pairs = 0
    for i in range(len(reps)):
        if not adm[i]:
            continue
        for j in range(len(reps)):
            if i == j or not adm[j]:
                continue
            ri, rj = reps[i], reps[j]
            if ri.mass <= rj.mass and ri.hamiltonian <= rj.hamiltonian:
                n_pairs += 1
                strict = ri.mass < rj.mass or ri.hamiltonian < rj.hamiltonian
                if vals[i].value > vals[j].value:
                    order_bad += 1
                elif strict and not vals[i].value < vals[j].value:
                    order_bad += 1

    if d_cap is None:
        finite = [v.value for v in vals if np.isfinite(v.value) and v.value > 0]
        d_cap = max(finite) if finite else 1.0
    grad_lo, grad_hi = np.inf, 0.0
    h1_lo, h1_hi = np.inf, 0.0
    gap = np.inf
    for u, r, v, a in zip(fields, reps, vals, adm):
        if not a or not (0.0 < v.value <= d_cap):
            continue
        if r.hamiltonian > 0:
            ratio = r.grad_norm_sq / r.hamiltonian
            grad_lo, grad_hi = min(grad_lo, ratio), max(grad_hi, ratio)
        h1 = r.mass + r.grad_norm_sq
        ratio = h1 / v.value
        h1_lo, h1_hi = min(h1_lo, ratio), max(h1_hi, ratio)
        if region.regime.code == "FF":
            gap = min(gap, abs(r.hamiltonian - region.mc_at(r.mass)))
    return MEIPropertyReport(
        n_fields=len(fields),
        n_pairs=n_pairs,
        zero_violations=zero_bad,
        membership_violations=member_bad,
        order_violations=order_bad,
        grad_ratio_range=(grad_lo, grad_hi),
        h1_ratio_range=(h1_lo, h1_hi),
        min_curve_gap=gap,
    )


def mei_drift(masses: np.ndarray, energies: np.ndarray, region: MEIRegion) -> float:
    """Max relative drift of D along a recorded (mass, energy) series."""
    vals = np.array(
        [mei_value(c, h, region).value for c, h in zip(masses, energies)]
    )
    if not np.all(np.isfinite(vals)):
        raise PreconditionError("trajectory leaves the admissible region")
    scale = max(abs(vals[0]), 1e-300)
    return float(np.max(np.abs(vals - vals[0]))) / scale


def region_for(
    regime: Regime,
    m_crit: float | None = None,
    h_crit: float | None = None,
    curve_c: np.ndarray | None = None,
    curve_h: np.ndarray | None = None,
) -> MEIRegion:
    """Convenience constructor with only the data the regime needs."""
    code = regime.code
    if code == "FF":
        return MEIRegion(FF, m_crit=m_crit, h_crit=h_crit,
                         curve_c=curve_c, curve_h=curve_h)
    if code == "DF":
        return MEIRegion(DF, h_crit=h_crit)
    if code == "FD":
        return MEIRegion(FD, m_crit=m_crit)
    return MEIRegion(DD)
