"""Built-in self test: identity suites runnable from the CLI.

Three groups with fixed seeds, so a pass/fail is reproducible:
dilogarithm functional equations, derivative checks of the built-in
potential against central finite differences, and the 5_2 complete
structure with its known volume. Kept deliberately lighter than the
full test suite; this is a smoke test for installations.
"""

import cmath
import math
import random
from dataclasses import dataclass

from . import dilog
from .potential import (
    builtin_five_two,
    eval_eta,
    eval_v,
    log_gradient,
    log_hessian,
    make_point,
    reduced_residual,
    shapes_from_point,
)
from .errors import KnotpotError

_PI2_6 = math.pi * math.pi / 6.0
_VOLUME_5_2 = 2.82812208833


@dataclass
class GroupResult:
    name: str
    passed: bool
    worst: float  # worst err/tol ratio over the group's checks
    detail: str


def _rand_z(rng, lo=0.08, hi=4.0):
    r = rng.uniform(lo, hi)
    th = rng.uniform(-math.pi + 0.1, math.pi - 0.1)
    return cmath.rect(r, th)


def _offish(z):
    # keep identity samples away from the real axis and the points 0, 1
    return abs(z.imag) > 0.05 and abs(z) > 0.05 and abs(z - 1) > 0.05


def dilog_identities(n=200, seed=1234) -> GroupResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(n):
        z = _rand_z(rng)
        while not (_offish(z) and z.imag > 0.05):
            z = _rand_z(rng)
        # inversion
        lhs = dilog.li2(z) + dilog.li2(1 / z)
        rhs = -_PI2_6 - 0.5 * dilog.principal_log(-z) ** 2
        worst = max(worst, abs(lhs - rhs) / 1e-11)
        # Li2 reflection
        if _offish(1 - z):
            lhs = dilog.li2(z) + dilog.li2(1 - z)
            rhs = _PI2_6 - dilog.principal_log(z) * dilog.principal_log(1 - z)
            worst = max(worst, abs(lhs - rhs) / 1e-11)
        # D symmetries
        d = dilog.bloch_wigner_d(z)
        worst = max(worst, abs(dilog.bloch_wigner_d(z.conjugate()) + d) / 1e-12)
        worst = max(worst, abs(dilog.bloch_wigner_d(1 / z) + d) / 1e-12)
        # five-term relation for D
        w = _rand_z(rng, 0.2, 2.0)
        if _offish(w) and _offish(z * w) and abs(1 - z * w) > 0.05:
            args = (z, w, (1 - z) / (1 - z * w), 1 - z * w, (1 - w) / (1 - z * w))
            if all(_offish(a) for a in args):
                worst = max(
                    worst, abs(sum(dilog.bloch_wigner_d(a) for a in args)) / 1e-10
                )
    return GroupResult(
        "dilog-identities", worst <= 1.0, worst, "%d samples" % n
    )


def _regular_points(spec, rng, count):
    pts = []
    while len(pts) < count:
        values = {
            v: _rand_z(rng, 0.3, 2.5) for v in spec.variables
        }
        try:
            pt = make_point(spec, values)
        except KnotpotError:
            continue
        ok = True
        for t in spec.dilog_terms:
            m = t.argument.evaluate(values)
            if not (abs(m.imag) > 0.05 and abs(m - 1) > 0.05 and abs(m) > 0.05):
                ok = False
                break
        for v in values.values():
            if math.pi - abs(cmath.phase(v)) < 0.05:
                ok = False  # too close to the log cut for differencing
        if ok:
            pts.append(pt)
    return pts


def derivative_checks(n=25, seed=4321) -> GroupResult:
    spec = builtin_five_two()
    rng = random.Random(seed)
    h = 1e-6
    worst = 0.0
    for pt in _regular_points(spec, rng, n):
        g = log_gradient(spec, pt)
        hess = log_hessian(spec, pt)
        for j, v in enumerate(spec.variables):
            up = dict(pt.values)
            dn = dict(pt.values)
            up[v] = pt.values[v] * math.exp(h)
            dn[v] = pt.values[v] * math.exp(-h)
            pu = make_point(spec, up)
            pd = make_point(spec, dn)
            fd = (eval_v(spec, pu) - eval_v(spec, pd)) / (2 * h)
            scale = max(1.0, abs(g[j]))
            worst = max(worst, abs(fd - g[j]) / scale / 1e-6)
            fdg = (log_gradient(spec, pu) - log_gradient(spec, pd)) / (2 * h)
            for i in range(len(spec.variables)):
                scale = max(1.0, abs(hess[i, j]))
                worst = max(worst, abs(fdg[i] - hess[i, j]) / scale / 1e-6)
    # numpy scalars leak through the hessian math; keep the result plain
    worst = float(worst)
    return GroupResult("derivative-checks", worst <= 1.0, worst, "%d points" % n)


def complete_structure_check() -> GroupResult:
    from .solver import solve_complete  # local import; solver pulls this module's deps

    spec = builtin_five_two()
    worst = 0.0
    try:
        cp = solve_complete(spec)
    except KnotpotError as e:
        return GroupResult("complete-structure", False, math.inf, str(e))
    pt = cp.point
    x = pt.values["x"]
    y = pt.values["y"]
    worst = max(worst, abs(x**3 - x - 1) / 1e-12)
    worst = max(worst, abs(y - (x + 1)) / 1e-12)
    eta, _ = eval_eta(spec, pt)
    worst = max(worst, abs(eta - 1) / 1e-10)
    vol = eval_v(spec, pt).imag
    vols = sum(dilog.bloch_wigner_d(z) for z in shapes_from_point(pt).as_tuple())
    worst = max(worst, abs(vol - _VOLUME_5_2) / 1e-8)
    worst = max(worst, abs(vols - _VOLUME_5_2) / 1e-8)
    worst = max(worst, abs(vol - vols) / 1e-9)
    worst = max(worst, max(abs(r) for r in reduced_residual(pt)) / 1e-12)
    return GroupResult(
        "complete-structure", worst <= 1.0, worst, "x = %s" % format(x, ".6g")
    )


def run_selftest():
    return [dilog_identities(), derivative_checks(), complete_structure_check()]
