"""Geometric invariants of solved structures.

Volume comes out of the potential two independent ways (the imaginary
part of V_alpha and the Bloch-Wigner sum over the tetrahedron shapes),
which accepted solutions must reconcile to 1e-9. The Chern-Simons
value is recovered modulo 1/2, and only up to one global additive
constant shared by all slopes: differences between slopes are the
well-defined content. Core geodesic length and torsion come from the
tracked meridian log-holonomy.
"""

import math
import warnings
from dataclasses import dataclass

from . import dilog
from .errors import ValidationError
from .potential import (
    ParamPoint,
    PotentialSpec,
    Shapes,
    eval_v,
    log_gradient,
    shapes_from_point,
)
from .solver import CriticalPoint, FillingSolution, Slope

_PI = math.pi
_PI2 = math.pi * math.pi
_CS_AMBIGUITY = 0.5


@dataclass(frozen=True)
class InvariantReport:
    volume: float
    volume_from_shapes: float
    cs_value: float  # representative in [0, 1/2)
    cs_ambiguity: float  # always 1/2; values are classes mod this
    geodesic_length: float
    geodesic_torsion: float  # representative in [0, 2 pi / q)
    v_alpha: complex
    length_sign: int  # sign of Re(complex length) before |.|


def _point_of(sol) -> ParamPoint:
    if isinstance(sol, FillingSolution):
        return sol.critical.point
    if isinstance(sol, CriticalPoint):
        return sol.point
    if isinstance(sol, ParamPoint):
        return sol
    raise TypeError("expected a solution or point, got %r" % type(sol))


def eval_v_alpha(spec: PotentialSpec, slope: Slope, pt: ParamPoint) -> complex:
    """V_alpha = V + [log xi (2 pi i - p log xi) + s pi^2]/q, continued log xi."""
    lx = pt.logs[spec.meridian].value
    return eval_v(spec, pt) + (
        lx * (2j * _PI - slope.p * lx) + slope.s * _PI2
    ) / slope.q


def volume_of(spec: PotentialSpec, slope, sol) -> float:
    """Im V_alpha at the solution; Im V when slope is None (complete)."""
    pt = _point_of(sol)
    if slope is None:
        return eval_v(spec, pt).imag
    return eval_v_alpha(spec, slope, pt).imag


def volume_from_shapes(sh: Shapes) -> float:
    """Bloch-Wigner volume sum D(c2)+D(d4)+D(a5)+D(b5)+D(d5)."""
    return sum(dilog.bloch_wigner_d(z) for z in sh.as_tuple())


def chern_simons_of(spec: PotentialSpec, slope: Slope, sol):
    """(cs_value, 1/2): -Re(V_alpha)/(2 pi^2) reduced into [0, 1/2).

    A global additive constant (one number for the whole manifold,
    independent of slope) is not determined here; reported values
    compare across slopes only through their differences.
    """
    raw = -eval_v_alpha(spec, slope, _point_of(sol)).real / (2 * _PI2)
    return raw % _CS_AMBIGUITY, _CS_AMBIGUITY


def core_geodesic_of(slope: Slope, sol):
    """(length, torsion) of the filling's core geodesic.

    Complex length lambda = 2(s pi i - log xi)/q; length is |Re| (the
    continuation may land on either orientation) and torsion is the
    representative of Im in [0, 2 pi / q).
    """
    pt = _point_of(sol)
    meridian = pt.spec.meridian
    lam = 2 * (slope.s * _PI * 1j - pt.logs[meridian].value) / slope.q
    if abs(lam.real) < 1e-9:
        warnings.warn("zero-length core geodesic: degenerate filling", stacklevel=2)
    return abs(lam.real), lam.imag % (2 * _PI / slope.q)


def rogers_combo(spec: PotentialSpec, pt: ParamPoint) -> complex:
    """Signed Rogers sum over the dilog terms plus the pi^2 constant.

    Agrees with V + (u/2)(v/2) on the deformation space up to a branch
    constant that is locally constant along continued paths (exactly 0
    on the branch through the complete structure).
    """
    s = 0j
    for t in spec.dilog_terms:
        s += t.sign * dilog.rogers_r(t.argument.evaluate(pt.values))
    return s + float(spec.constant_pi2) * _PI2


def im_v_alpha_parts(spec: PotentialSpec, pt: ParamPoint, slope=None):
    """(D-sum, log-modulus correction) whose total is Im V (or Im V_alpha).

    The first part is sum sign * D(m); the second is
    sum_v log|v| Im(v dV_alpha/dv), which vanishes at critical points.
    Valid at any regular point with principal branches.
    """
    d_sum = sum(
        t.sign * dilog.bloch_wigner_d(t.argument.evaluate(pt.values))
        for t in spec.dilog_terms
    )
    g = log_gradient(spec, pt)
    g = list(g)
    if slope is not None:
        lx = pt.logs[spec.meridian].value
        g[-1] += (2j * _PI - 2 * slope.p * lx) / slope.q
    corr = 0.0
    for v, gv in zip(spec.variables, g):
        corr += math.log(abs(pt.values[v])) * gv.imag
    return d_sum, corr


def report_for(spec: PotentialSpec, slope: Slope, sol: FillingSolution) -> InvariantReport:
    """Full invariant report for an accepted filling solution."""
    pt = _point_of(sol)
    va = eval_v_alpha(spec, slope, pt)
    try:
        vfs = volume_from_shapes(shapes_from_point(pt))
    except ValidationError:
        # no 3-variable shape recovery; the signed term sum is the
        # same quantity for potentials of this construction
        vfs = im_v_alpha_parts(spec, pt, slope)[0]
    cs, amb = chern_simons_of(spec, slope, sol)
    length, torsion = core_geodesic_of(slope, sol)
    lam_re = -2 * pt.logs[spec.meridian].value.real / slope.q
    return InvariantReport(
        volume=va.imag,
        volume_from_shapes=vfs,
        cs_value=cs,
        cs_ambiguity=amb,
        geodesic_length=length,
        geodesic_torsion=torsion,
        v_alpha=va,
        length_sign=1 if lam_re >= 0 else -1,
    )
