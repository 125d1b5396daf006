"""Newton solver and continuation driver.

Three entry points, all built on damped Newton iterations in the log
coordinates of the parameter point:

  solve_complete    the complete structure, meridian pinned to 1
  trace_deformation samples of the deformation space along a u-segment
  solve_filling     the Dehn-filling critical point for a slope p/q

Throughout, u = log xi^2 and v = log eta^2 are the branch-continued
log-holonomies of meridian and longitude, seeded u = v = 0 at the
complete structure; windings evolve only by continuation. Acceptance
is always on the branch-free reduced residuals, never on the Newton
residual alone.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dilog import ContinuedLog, bloch_wigner_d, principal_log
from .errors import (
    KnotpotError,
    NoConvergenceError,
    NoGeometricRootError,
    PathObstructionError,
    SingularJacobianError,
    SingularPointError,
    StepTooLargeError,
    ValidationError,
    ZeroDenominatorError,
)
from .potential import (
    ParamPoint,
    PotentialSpec,
    advance_point_logs,
    d_eta_log,
    eta_log,
    eval_v,
    log_gradient,
    log_hessian,
    make_point,
    reduced_residual,
)

_TWO_PI_I = 2j * math.pi

# a converged endpoint whose total shape volume is below this is a
# flat representation, not a hyperbolic filling; the smallest genuine
# filling volumes are O(1), numeric dust at a flat endpoint is O(1e-5)
_FLAT_TOL = 1e-4

# at a geometric endpoint Im V_alpha and the shape-volume sum agree to
# residual accuracy; a larger gap means a dilog argument crossed its
# cut on the way, i.e. the path left the geometric branch
_BRANCH_TOL = 1e-6


@dataclass(frozen=True)
class Slope:
    """Slope p/q in lowest terms with its canonical cocycle (r, s).

    ps - qr = 1; q >= 1; 0 <= s < q for q > 1 and (r, s) = (-1, 0)
    for q = 1.
    """

    p: int
    q: int
    r: int
    s: int

    def __str__(self):
        return "%d/%d" % (self.p, self.q)


@dataclass
class NewtonResult:
    """Outcome of a generic newton_refine call."""

    z: np.ndarray
    residual_inf_norm: float
    newton_iters: int


@dataclass
class CriticalPoint:
    point: ParamPoint
    residual_inf_norm: float
    newton_iters: int


@dataclass
class FillingSolution:
    slope: Slope
    critical: CriticalPoint
    u: ContinuedLog  # log xi^2, tracked
    v: ContinuedLog  # log eta^2, tracked
    path_steps: int

    @property
    def filling_residual(self) -> float:
        return abs(
            self.slope.p * self.u.value + self.slope.q * self.v.value - _TWO_PI_I
        )


@dataclass
class DeformationSample:
    u: complex  # log xi^2 along the traced segment
    point: ParamPoint
    v: complex  # log eta^2, continued, v(0) = 0


def normalize_slope(p_raw: int, q_raw: int) -> Slope:
    """Lowest-terms slope with q >= 1 and the canonical cocycle."""
    if q_raw == 0:
        raise ZeroDenominatorError("slope with q = 0 (meridian) is not a filling")
    g = math.gcd(p_raw, q_raw)
    p, q = p_raw // g, q_raw // g
    if q < 0:
        p, q = -p, -q
    if q == 1:
        s, r = 0, -1
    else:
        s = pow(p, -1, q)  # exists since gcd(p, q) = 1
        r = (p * s - 1) // q
    return Slope(p, q, r, s)


def newton_refine(system, start, tol: float, max_iters: int = 50) -> NewtonResult:
    """Damped Newton on a square system with analytic Jacobian.

    `system` maps an iterate (complex vector) to (F, J). Steps that do
    not decrease the residual norm are halved up to 8 times; a
    Jacobian with condition estimate above 1e14 aborts.
    """
    z = np.atleast_1d(np.asarray(start, dtype=complex))
    f, jac = system(z)
    f = np.atleast_1d(np.asarray(f, dtype=complex))
    best = float(np.max(np.abs(f)))
    for it in range(max_iters):
        rn = float(np.max(np.abs(f)))
        best = min(best, rn)
        # singularity outranks convergence: z^2 at 0 is a root with a
        # vanishing Jacobian and must be reported, not returned
        jm = np.atleast_2d(np.asarray(jac, dtype=complex))
        if not np.all(np.isfinite(jm)) or np.linalg.cond(jm) > 1e14:
            raise SingularJacobianError(
                "Jacobian condition estimate exceeds 1e14 at iteration %d" % it
            )
        if rn <= tol:
            return NewtonResult(z, rn, it)
        step = np.linalg.solve(jm, f)
        scale = 1.0
        for _ in range(9):
            z2 = z - scale * step
            f2, j2 = system(z2)
            f2 = np.atleast_1d(np.asarray(f2, dtype=complex))
            if float(np.max(np.abs(f2))) < rn:
                z, f, jac = z2, f2, j2
                break
            scale *= 0.5
        else:
            raise NoConvergenceError(
                "line search stalled at residual %.3e" % rn, best_residual=best
            )
    rn = float(np.max(np.abs(f)))
    if rn <= tol:
        return NewtonResult(z, rn, max_iters)
    raise NoConvergenceError(
        "no convergence in %d iterations" % max_iters, best_residual=min(best, rn)
    )


def _resid_inf(pt) -> float:
    return max(abs(r) for r in reduced_residual(pt))


def _newton_fiber(spec, pt, xi_log, tol, max_iters=50) -> CriticalPoint:
    """Newton on the non-meridian variables at a fixed meridian log.

    Drives the continued-log gradient to zero, branch-continuing from
    pt at each trial step (halving on a branch jump), and accepts on
    the reduced residuals.
    """
    names = spec.variables[:-1]
    k = len(names)
    logmap = {v: pt.logs[v].value for v in spec.variables}
    logmap[spec.meridian] = xi_log
    pt = advance_point_logs(pt, logmap)
    for it in range(max_iters):
        if _resid_inf(pt) <= tol:
            return CriticalPoint(pt, _resid_inf(pt), it)
        g = log_gradient(spec, pt)[:k]
        h = log_hessian(spec, pt)[:k, :k]
        step = np.linalg.solve(h, g)
        scale = 1.0
        for _ in range(40):
            trial = {v: pt.logs[v].value for v in spec.variables}
            for i, v in enumerate(names):
                trial[v] -= scale * step[i]
            try:
                pt = advance_point_logs(pt, trial)
                break
            except (StepTooLargeError, SingularPointError):
                scale *= 0.5
        else:
            raise NoConvergenceError(
                "could not step without a branch jump", best_residual=_resid_inf(pt)
            )
    raise NoConvergenceError(
        "fiber Newton: no convergence in %d iterations" % max_iters,
        best_residual=_resid_inf(pt),
    )


# Fixed complete-structure seed grid: 16 (x, y) starting pairs, a
# coarse cover of the unit-scale region where tetrahedron shapes of
# cusped knots live. Order matters for determinism.
_SEED_X = (-0.5 + 0.8j, 0.5 + 0.8j, -0.5 - 0.8j, 0.3 + 0.6j)
_SEED_Y = (0.3 + 0.6j, 0.5 + 0.8j, -1.3, 1.3)
DEFAULT_SEEDS = tuple(
    {"x": sx, "y": sy} for sx in _SEED_X for sy in _SEED_Y
)


def _term_volume(spec, pt) -> float:
    return sum(
        t.sign * bloch_wigner_d(t.argument.evaluate(pt.values))
        for t in spec.dilog_terms
    )


def solve_complete(
    spec: PotentialSpec, seeds=None, newton_tol: float = 1e-12
) -> CriticalPoint:
    """Complete structure: meridian pinned to 1, geometric root selected.

    Runs Newton from each seed in order, collects distinct converged
    roots, and returns the first whose dilog arguments are all off the
    real axis with total shape volume sum sign*D > 0. A root found
    with negative total volume is replaced by its complex conjugate
    (same equations, opposite orientation).
    """
    if seeds is None:
        if tuple(spec.variables[:-1]) != ("x", "y"):
            raise ValidationError(
                "default seed grid covers variables (x, y); pass seeds explicitly"
            )
        seeds = [dict(s) for s in DEFAULT_SEEDS]
    meridian = spec.meridian
    roots = []
    best_resid = math.inf
    for seed in seeds:
        values = dict(seed)
        values[meridian] = 1.0
        try:
            pt0 = make_point(spec, values)
            cp = _newton_fiber(spec, pt0, 0j, newton_tol)
        except (KnotpotError, np.linalg.LinAlgError):
            continue
        key = tuple(
            (round(cp.point.values[v].real, 9), round(cp.point.values[v].imag, 9))
            for v in spec.variables
        )
        if key not in [k for k, _ in roots]:
            roots.append((key, cp))
        best_resid = min(best_resid, cp.residual_inf_norm)
    if not roots:
        raise NoConvergenceError(
            "no seed converged for %s" % spec.name, best_residual=None
        )
    for _, cp in roots:
        vol = _term_volume(spec, cp.point)
        if vol < -_FLAT_TOL:
            conj_values = {v: cp.point.values[v].conjugate() for v in spec.variables}
            pt = make_point(spec, conj_values)
            cp = CriticalPoint(pt, _resid_inf(pt), cp.newton_iters)
            vol = _term_volume(spec, pt)
        if vol > _FLAT_TOL and all(
            abs(t.argument.evaluate(cp.point.values).imag) > 1e-9
            for t in spec.dilog_terms
        ):
            return cp
    raise NoGeometricRootError(
        "all converged roots are flat (best residual %.3e)" % best_resid
    )


def trace_deformation(
    spec: PotentialSpec,
    u_end: complex,
    samples: int,
    complete: Optional[CriticalPoint] = None,
    newton_tol: float = 1e-12,
):
    """Sample the deformation space along u from 0 to u_end.

    u = log xi^2, so the meridian moves along xi = exp(u/2). Each of
    the `samples` evenly spaced targets is reached by warm-started
    Newton on (x, y); the step is halved (up to 20 times) whenever the
    branch continuation rejects a jump. Emits one DeformationSample
    per target.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if complete is None:
        complete = solve_complete(spec, newton_tol=newton_tol)
    pt = complete.point
    u_end = complex(u_end)
    if u_end == 0:
        return [DeformationSample(0j, pt, 2 * eta_log(spec, pt))]
    out = []
    t = 0.0
    for k in range(1, samples + 1):
        target = k / samples
        step = target - t
        halvings = 0
        while t < target - 1e-15:
            nxt = min(target, t + step)
            try:
                cp = _newton_fiber(spec, pt, (nxt * u_end) / 2.0, newton_tol)
                pt = cp.point
                t = nxt
            except (KnotpotError, np.linalg.LinAlgError) as e:
                step /= 2.0
                halvings += 1
                if halvings > 20:
                    err = PathObstructionError(
                        "deformation path obstructed at u = %s (%s)"
                        % (t * u_end, e),
                        t_reached=t,
                    )
                    err.partial = out
                    raise err from e
        out.append(DeformationSample(t * u_end, pt, 2 * eta_log(spec, pt)))
    return out


def _filling_system(spec, pt, p, q, t):
    names = spec.variables
    k = len(names) - 1
    g = log_gradient(spec, pt)
    u2 = 2 * pt.logs[spec.meridian].value
    v2 = 2 * eta_log(spec, pt)
    f = np.empty(k + 1, dtype=complex)
    f[:k] = g[:k]
    f[k] = p * u2 + q * v2 - _TWO_PI_I * t
    jac = np.zeros((k + 1, k + 1), dtype=complex)
    jac[:k, :] = log_hessian(spec, pt)[:k, :]
    deta = d_eta_log(spec, pt)
    for j in range(k + 1):
        jac[k, j] = 2 * q * deta[j]
    jac[k, k] += 2 * p
    return f, jac


def _newton_filling(spec, pt, p, q, t, tol, max_iters=60):
    names = spec.variables
    for it in range(max_iters):
        f, jac = _filling_system(spec, pt, p, q, t)
        if _resid_inf(pt) <= tol and abs(f[-1]) <= tol:
            return pt, it
        step = np.linalg.solve(jac, f)
        scale = 1.0
        for _ in range(40):
            trial = {
                v: pt.logs[v].value - scale * step[i] for i, v in enumerate(names)
            }
            try:
                pt = advance_point_logs(pt, trial)
                break
            except (StepTooLargeError, SingularPointError):
                scale *= 0.5
        else:
            raise NoConvergenceError("could not step without a branch jump")
    raise NoConvergenceError("filling Newton: no convergence", best_residual=None)


def solve_filling(
    spec: PotentialSpec,
    slope: Slope,
    complete: Optional[CriticalPoint] = None,
    accept_tol: float = 1e-10,
    newton_tol: float = 1e-12,
) -> FillingSolution:
    """Critical point of V_alpha for a slope, by homotopy from u = 0.

    Solves {x-equation, y-equation, p u + q v = 2 pi i t} while t
    scales from 0 to 1, warm-starting each Newton solve at the
    previous t and halving the t-step whenever Newton or the branch
    continuation fails. A path whose step collapses, or whose endpoint
    is a flat (zero total shape volume) representation, raises
    PathObstructionError: the slope is possibly exceptional.
    """
    if complete is None:
        complete = solve_complete(spec, newton_tol=newton_tol)
    p, q = slope.p, slope.q
    pt = complete.point
    t = 0.0
    dt = 0.25
    steps = 0
    iters = 0
    while t < 1.0 - 1e-15:
        target = min(1.0, t + dt)
        try:
            pt2, it = _newton_filling(spec, pt, p, q, target, newton_tol)
            pt, t = pt2, target
            steps += 1
            iters += it
            dt = min(dt * 2.0, 1.0)
        except (KnotpotError, np.linalg.LinAlgError) as e:
            dt /= 2.0
            if dt < 1e-7:
                raise PathObstructionError(
                    "filling path for %s obstructed at t = %.6f (%s)" % (slope, t, e),
                    t_reached=t,
                ) from e

    resid = _resid_inf(pt)
    u_val = 2 * pt.logs[spec.meridian].value
    v_val = 2 * eta_log(spec, pt)
    fill_resid = abs(p * u_val + q * v_val - _TWO_PI_I)
    if resid > accept_tol or fill_resid > 1e-9:
        raise NoConvergenceError(
            "filling for %s finished with residual %.3e / %.3e" % (slope, resid, fill_resid),
            best_residual=resid,
        )
    vol_shapes = _term_volume(spec, pt)
    if vol_shapes < _FLAT_TOL:
        raise PathObstructionError(
            "filling for %s converged to a flat solution; slope possibly exceptional"
            % slope,
            t_reached=1.0,
        )
    lx = pt.logs[spec.meridian].value
    v_alpha = eval_v(spec, pt) + (
        lx * (_TWO_PI_I - slope.p * lx) + slope.s * math.pi**2
    ) / slope.q
    if abs(v_alpha.imag - vol_shapes) > _BRANCH_TOL:
        raise PathObstructionError(
            "filling for %s left the geometric branch (volume routes disagree "
            "by %.3e); slope possibly exceptional"
            % (slope, abs(v_alpha.imag - vol_shapes)),
            t_reached=1.0,
        )

    def tracked(value):
        w = cmath.exp(value)
        k = round((value - principal_log(w)).imag / (2 * math.pi))
        return ContinuedLog(value, k)

    return FillingSolution(
        slope=slope,
        critical=CriticalPoint(pt, resid, iters),
        u=tracked(u_val),
        v=tracked(v_val),
        path_steps=steps,
    )
