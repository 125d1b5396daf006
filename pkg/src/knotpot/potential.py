"""Data model and evaluation of dilogarithm potential functions.

A potential V(x, y, xi) is a signed sum of dilogarithms of Laurent
monomials, plus a quadratic form in the logs of the variables, plus a
rational multiple of pi^2. Its critical points solve the hyperbolicity
equations of a knot complement; the meridian variable (always declared
last) parametrizes the deformation space, and a separate longitude
expression gives the second cusp eigenvalue.

The module ships the 5_2 knot potential as a built-in and can load
user potentials from a small JSON document (see load_spec). Evaluation
is branch-aware: a ParamPoint carries a continued logarithm for every
variable and for 1 - m of every tracked monomial, so gradients and the
longitude log stay on one analytic sheet while a solver moves the
point. Values of Li2 itself are always principal; all multivaluedness
lives in the stored logs.
"""

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .dilog import ContinuedLog, continue_log, continued, li2, principal_log
from .errors import SingularPointError, SpecFormatError, ValidationError
from .errors import DegenerateModulusError

_PI2 = math.pi * math.pi

# rejection thresholds for genuine singularities of V; points this
# close to a pole or a dilog argument of 1 are rejected, not clamped
_ZERO_TOL = 1e-13
_ONE_TOL = 1e-13


@dataclass(frozen=True)
class Monomial:
    """Laurent monomial prod var^exp, stored as sorted (var, exp) pairs."""

    exponents: tuple

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> "Monomial":
        items = tuple(sorted((v, int(e)) for v, e in d.items() if int(e) != 0))
        return cls(items)

    def as_dict(self) -> dict:
        return dict(self.exponents)

    def exponent(self, var: str) -> int:
        for v, e in self.exponents:
            if v == var:
                return e
        return 0

    def variables(self):
        return [v for v, _ in self.exponents]

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        r = 1 + 0j
        for v, e in self.exponents:
            r *= values[v] ** e
        return r

    def __str__(self):
        return " ".join("%s^%d" % ve for ve in self.exponents) or "1"


@dataclass(frozen=True)
class DilogTerm:
    sign: int
    argument: Monomial


@dataclass(frozen=True)
class QuadLogTerm:
    """Contributes coeff * log(var_a) * log(var_b) to V."""

    coeff: Fraction
    var_a: str
    var_b: str


@dataclass(frozen=True)
class LongitudeExpr:
    """prefactor * prod (1 - argument)^exponent."""

    prefactor: Monomial
    factors: tuple  # of (exponent: int, argument: Monomial)


@dataclass(frozen=True)
class LongitudeSpec(LongitudeExpr):
    alternate: Optional[LongitudeExpr] = None


@dataclass(frozen=True)
class PotentialSpec:
    name: str
    variables: tuple  # ordered; the last entry is the meridian
    dilog_terms: tuple
    quad_terms: tuple
    constant_pi2: Fraction
    longitude: LongitudeSpec

    @property
    def meridian(self) -> str:
        return self.variables[-1]

    def tracked_monomials(self):
        """Dilog arguments then longitude factor arguments, deduplicated."""
        seen = []
        for t in self.dilog_terms:
            if t.argument not in seen:
                seen.append(t.argument)
        exprs = [self.longitude]
        if self.longitude.alternate is not None:
            exprs.append(self.longitude.alternate)
        for expr in exprs:
            for _, m in expr.factors:
                if m not in seen:
                    seen.append(m)
        return seen


@dataclass(frozen=True)
class ParamPoint:
    """A point in parameter space with its branch bookkeeping.

    values[v] = exp(logs[v].value) by construction, and one_minus_logs
    holds a continued log(1 - m) for every tracked monomial. A factor
    that appears only in the longitude may legitimately sit at m = 1;
    its entry is then None and only longitude evaluation rejects it.
    """

    spec: PotentialSpec
    values: dict
    logs: dict
    one_minus_logs: dict


@dataclass(frozen=True)
class Shapes:
    """Tetrahedron moduli of the five-tetrahedron parametrization."""

    c2: complex
    d4: complex
    a5: complex
    b5: complex
    d5: complex

    def as_tuple(self):
        return (self.c2, self.d4, self.a5, self.b5, self.d5)


def builtin_five_two() -> PotentialSpec:
    """The 5_2 knot potential.

    V = -Li2(1/(y xi)) + Li2(y/xi) - Li2(y/x) + Li2(xi/x) + Li2(x/xi)
        + log xi * log(x^2 / (y^2 xi^6)) - pi^2/6,

    with longitude eigenvalue eta = (y xi^6 / x)(1 - 1/(y xi)), equal
    on the deformation space to
    (y xi^6 / x)(1 - xi/x) / ((1 - x/xi)(1 - y/xi)).
    """
    m = Monomial.from_dict
    dilogs = (
        DilogTerm(-1, m({"y": -1, "xi": -1})),
        DilogTerm(+1, m({"y": 1, "xi": -1})),
        DilogTerm(-1, m({"y": 1, "x": -1})),
        DilogTerm(+1, m({"x": -1, "xi": 1})),
        DilogTerm(+1, m({"x": 1, "xi": -1})),
    )
    quads = (
        QuadLogTerm(Fraction(2), "xi", "x"),
        QuadLogTerm(Fraction(-2), "xi", "y"),
        QuadLogTerm(Fraction(-6), "xi", "xi"),
    )
    longitude = LongitudeSpec(
        prefactor=m({"x": -1, "y": 1, "xi": 6}),
        factors=((1, m({"y": -1, "xi": -1})),),
        alternate=LongitudeExpr(
            prefactor=m({"x": -1, "y": 1, "xi": 6}),
            factors=(
                (1, m({"xi": 1, "x": -1})),
                (-1, m({"x": 1, "xi": -1})),
                (-1, m({"y": 1, "xi": -1})),
            ),
        ),
    )
    return PotentialSpec(
        name="5_2",
        variables=("x", "y", "xi"),
        dilog_terms=dilogs,
        quad_terms=quads,
        constant_pi2=Fraction(-1, 6),
        longitude=longitude,
    )


BUILTINS = {"5_2": builtin_five_two}


# ---------------------------------------------------------------- I/O

_TOP_FIELDS = {
    "name",
    "variables",
    "dilog_terms",
    "quad_terms",
    "constant_pi2",
    "longitude",
    "meridian",
}


def _check_fields(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ValidationError("%s: expected an object" % where)
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ValidationError("%s: unknown field(s) %s" % (where, sorted(unknown)))


def _parse_monomial(obj, variables, where) -> Monomial:
    if not isinstance(obj, dict):
        raise ValidationError("%s: monomial must be a var -> exponent map" % where)
    for v, e in obj.items():
        if v not in variables:
            raise ValidationError("%s: undeclared variable %r" % (where, v))
        if not isinstance(e, int):
            raise ValidationError("%s: exponent of %r must be an integer" % (where, v))
    return Monomial.from_dict(obj)


def _parse_rational(obj, where) -> Fraction:
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or not all(isinstance(k, int) for k in obj)
    ):
        raise ValidationError("%s: rational must be [numerator, denominator]" % where)
    num, den = obj
    if den <= 0:
        raise ValidationError("%s: denominator must be positive" % where)
    if math.gcd(num, den) != 1:
        raise ValidationError("%s: rational %d/%d is not reduced" % (where, num, den))
    return Fraction(num, den)


def _parse_longitude_expr(obj, variables, where, allow_alternate):
    fields = {"prefactor", "factors"} | ({"alternate"} if allow_alternate else set())
    _check_fields(obj, fields, where)
    if "prefactor" not in obj or "factors" not in obj:
        raise ValidationError("%s: needs prefactor and factors" % where)
    prefactor = _parse_monomial(obj["prefactor"], variables, where + ".prefactor")
    factors = []
    for i, f in enumerate(obj["factors"]):
        fw = "%s.factors[%d]" % (where, i)
        _check_fields(f, {"exp", "arg"}, fw)
        if not isinstance(f.get("exp"), int):
            raise ValidationError(fw + ": exp must be an integer")
        factors.append((f["exp"], _parse_monomial(f.get("arg", {}), variables, fw)))
    return prefactor, tuple(factors)


def load_spec(source) -> PotentialSpec:
    """Parse and validate a potential spec document.

    Accepts a str, bytes, or a readable file object. Unknown fields
    are rejected so typos fail loudly rather than silently changing
    the potential.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as e:
        raise SpecFormatError(
            "parse error at line %d column %d: %s" % (e.lineno, e.colno, e.msg)
        ) from e

    _check_fields(doc, _TOP_FIELDS, "document")
    missing = _TOP_FIELDS - set(doc)
    if missing:
        raise ValidationError("document: missing field(s) %s" % sorted(missing))
    if not isinstance(doc["name"], str):
        raise ValidationError("name: must be a string")
    variables = doc["variables"]
    if (
        not isinstance(variables, list)
        or not variables
        or not all(isinstance(v, str) for v in variables)
    ):
        raise ValidationError("variables: must be a non-empty list of strings")
    if len(set(variables)) != len(variables):
        raise ValidationError("variables: names must be distinct")
    if doc["meridian"] != variables[-1]:
        raise ValidationError("meridian: must name the last declared variable")

    dilog_terms = []
    for i, t in enumerate(doc["dilog_terms"]):
        where = "dilog_terms[%d]" % i
        _check_fields(t, {"sign", "arg"}, where)
        if t.get("sign") not in (-1, 1):
            raise ValidationError(where + ": sign must be -1 or 1")
        dilog_terms.append(
            DilogTerm(t["sign"], _parse_monomial(t.get("arg", {}), variables, where))
        )

    quad_terms = []
    meridian_in_quads = False
    for i, t in enumerate(doc["quad_terms"]):
        where = "quad_terms[%d]" % i
        _check_fields(t, {"coeff", "vars"}, where)
        coeff = _parse_rational(t.get("coeff"), where + ".coeff")
        vs = t.get("vars")
        if not isinstance(vs, list) or len(vs) != 2:
            raise ValidationError(where + ": vars must be a pair")
        for v in vs:
            if v not in variables:
                raise ValidationError("%s: undeclared variable %r" % (where, v))
        meridian_in_quads = meridian_in_quads or doc["meridian"] in vs
        quad_terms.append(QuadLogTerm(coeff, vs[0], vs[1]))
    if not meridian_in_quads:
        raise ValidationError("quad_terms: meridian variable never appears")

    constant = _parse_rational(doc["constant_pi2"], "constant_pi2")

    lon = doc["longitude"]
    pre, factors = _parse_longitude_expr(lon, variables, "longitude", True)
    alternate = None
    if "alternate" in lon:
        apre, afac = _parse_longitude_expr(
            lon["alternate"], variables, "longitude.alternate", False
        )
        alternate = LongitudeExpr(apre, afac)

    return PotentialSpec(
        name=doc["name"],
        variables=tuple(variables),
        dilog_terms=tuple(dilog_terms),
        quad_terms=tuple(quad_terms),
        constant_pi2=constant,
        longitude=LongitudeSpec(pre, factors, alternate),
    )


def _mono_doc(m: Monomial, variables):
    order = {v: i for i, v in enumerate(variables)}
    return {v: e for v, e in sorted(m.exponents, key=lambda ve: order[ve[0]])}


def dump_spec(spec: PotentialSpec) -> str:
    """Serialize a spec to the document format; load_spec round-trips it."""
    variables = spec.variables

    def expr_doc(expr):
        d = {
            "prefactor": _mono_doc(expr.prefactor, variables),
            "factors": [
                {"exp": e, "arg": _mono_doc(m, variables)} for e, m in expr.factors
            ],
        }
        return d

    lon = expr_doc(spec.longitude)
    if spec.longitude.alternate is not None:
        lon["alternate"] = expr_doc(spec.longitude.alternate)
    doc = {
        "name": spec.name,
        "variables": list(variables),
        "dilog_terms": [
            {"sign": t.sign, "arg": _mono_doc(t.argument, variables)}
            for t in spec.dilog_terms
        ],
        "quad_terms": [
            {
                "coeff": [t.coeff.numerator, t.coeff.denominator],
                "vars": [t.var_a, t.var_b],
            }
            for t in spec.quad_terms
        ],
        "constant_pi2": [spec.constant_pi2.numerator, spec.constant_pi2.denominator],
        "longitude": lon,
        "meridian": spec.meridian,
    }
    return json.dumps(doc, indent=2) + "\n"


# ------------------------------------------------------------- points


def _build_point(spec, logmap, prev: Optional[ParamPoint]) -> ParamPoint:
    """Assemble a ParamPoint from explicit log values.

    Variable logs are taken verbatim (their winding is recovered
    exactly against the principal branch); the derived logs of 1 - m
    start principal when prev is None and are branch-continued from
    prev otherwise, so a StepTooLargeError here means the caller moved
    too far in one step.
    """
    values = {}
    logs = {}
    for v in spec.variables:
        lv = logmap[v]
        w = cmath.exp(lv)
        k = round((lv.imag - principal_log(w).imag) / (2 * math.pi))
        values[v] = w
        logs[v] = ContinuedLog(lv, k)
    one_minus = {}
    for m in spec.tracked_monomials():
        w = 1 - m.evaluate(values)
        if abs(w) < _ONE_TOL:
            if any(t.argument == m for t in spec.dilog_terms):
                raise SingularPointError("dilog argument %s = 1" % m)
            one_minus[m] = None  # longitude-only factor; reject lazily
            continue
        if prev is not None and prev.one_minus_logs.get(m) is not None:
            one_minus[m] = continue_log(prev.one_minus_logs[m], w)
        else:
            one_minus[m] = continued(w)
    return ParamPoint(spec, values, logs, one_minus)


def make_point(spec: PotentialSpec, values: Mapping[str, complex]) -> ParamPoint:
    """ParamPoint at the given variable values, all branches principal."""
    if set(values) != set(spec.variables):
        raise ValidationError(
            "values must cover exactly the variables %s" % (spec.variables,)
        )
    logmap = {}
    for v in spec.variables:
        w = complex(values[v])
        if abs(w) < _ZERO_TOL:
            raise SingularPointError("variable %s = 0 (log pole)" % v)
        logmap[v] = principal_log(w)
    return _build_point(spec, logmap, None)


def advance_point(pt: ParamPoint, values: Mapping[str, complex]) -> ParamPoint:
    """Move a point to nearby values, continuing every stored branch.

    Raises StepTooLargeError when any log would jump by a quarter turn
    or more; drivers halve their step and retry.
    """
    spec = pt.spec
    logmap = {}
    for v in spec.variables:
        w = complex(values[v])
        if abs(w) < _ZERO_TOL:
            raise SingularPointError("variable %s = 0 (log pole)" % v)
        logmap[v] = continue_log(pt.logs[v], w).value
    return _build_point(spec, logmap, pt)


def advance_point_logs(pt: ParamPoint, logmap: Mapping[str, complex]) -> ParamPoint:
    """Move a point to explicit new variable logs (solver step)."""
    return _build_point(pt.spec, logmap, pt)


# --------------------------------------------------------- evaluation


def eval_v(spec: PotentialSpec, pt: ParamPoint) -> complex:
    """V at pt: principal Li2 terms, continued-log quadratic part."""
    s = 0j
    for t in spec.dilog_terms:
        s += t.sign * li2(t.argument.evaluate(pt.values))
    for t in spec.quad_terms:
        s += float(t.coeff) * pt.logs[t.var_a].value * pt.logs[t.var_b].value
    return s + float(spec.constant_pi2) * _PI2


def log_gradient(spec: PotentialSpec, pt: ParamPoint) -> np.ndarray:
    """Vector of v dV/dv over spec.variables, from the stored logs.

    Component v is sum_terms -sign * a_v * log(1 - m) plus the
    quadratic contributions, with a_v the exponent of v in m. All logs
    are the continued branches carried by pt, so on a solution branch
    these are exactly the equations the solver drives to zero.
    """
    g = []
    for v in spec.variables:
        acc = 0j
        for t in spec.dilog_terms:
            a = t.argument.exponent(v)
            if a:
                acc -= t.sign * a * pt.one_minus_logs[t.argument].value
        for t in spec.quad_terms:
            c = float(t.coeff)
            if t.var_a == v:
                acc += c * pt.logs[t.var_b].value
            if t.var_b == v:
                acc += c * pt.logs[t.var_a].value
        g.append(acc)
    return np.array(g, dtype=complex)


def log_hessian(spec: PotentialSpec, pt: ParamPoint) -> np.ndarray:
    """Matrix of u d/du (v dV/dv); symmetric, quad terms are constants."""
    n = len(spec.variables)
    idx = {v: i for i, v in enumerate(spec.variables)}
    h = np.zeros((n, n), dtype=complex)
    for t in spec.dilog_terms:
        m = t.argument.evaluate(pt.values)
        if m == 1:
            raise SingularPointError("dilog argument %s = 1" % t.argument)
        f = t.sign * m / (1 - m)
        vs = t.argument.variables()
        for u in vs:
            au = t.argument.exponent(u)
            for v in vs:
                h[idx[u], idx[v]] += au * t.argument.exponent(v) * f
    for t in spec.quad_terms:
        c = float(t.coeff)
        h[idx[t.var_a], idx[t.var_b]] += c
        h[idx[t.var_b], idx[t.var_a]] += c
    return h


def eval_longitude_expr(expr: LongitudeExpr, values: Mapping[str, complex]) -> complex:
    """prefactor * prod (1 - m)^e, evaluated rationally (no logs)."""
    r = expr.prefactor.evaluate(values)
    for e, m in expr.factors:
        f = 1 - m.evaluate(values)
        if f == 0 and e < 0:
            raise SingularPointError("longitude factor 1 - %s = 0 in denominator" % m)
        r *= f**e
    return r


def eval_eta(spec: PotentialSpec, pt: ParamPoint):
    """(primary, alternate) values of the longitude eigenvalue.

    The alternate slot is None when the spec declares no alternate
    expression or when the alternate is singular at pt (0/0 corner);
    the primary must be evaluable or the point is rejected.
    """
    primary = eval_longitude_expr(spec.longitude, pt.values)
    alternate = None
    if spec.longitude.alternate is not None:
        try:
            alternate = eval_longitude_expr(spec.longitude.alternate, pt.values)
        except SingularPointError:
            alternate = None
    return primary, alternate


def eta_log(spec: PotentialSpec, pt: ParamPoint) -> complex:
    """Continued log of the longitude eigenvalue (primary expression).

    Built as a sum of the stored continued logs, so it is continuous
    along any path the point was continued over and equals 0 at a
    complete structure reached with principal branches.
    """
    s = 0j
    for v, e in spec.longitude.prefactor.exponents:
        s += e * pt.logs[v].value
    for e, m in spec.longitude.factors:
        cl = pt.one_minus_logs.get(m)
        if cl is None:
            raise SingularPointError("longitude factor 1 - %s = 0" % m)
        s += e * cl.value
    return s


def d_eta_log(spec: PotentialSpec, pt: ParamPoint) -> np.ndarray:
    """Derivatives v d(log eta)/dv over spec.variables (Jacobian row)."""
    out = []
    for v in spec.variables:
        acc = complex(spec.longitude.prefactor.exponent(v))
        for e, m in spec.longitude.factors:
            a = m.exponent(v)
            if a:
                mv = m.evaluate(pt.values)
                acc -= e * a * mv / (1 - mv)
        out.append(acc)
    return np.array(out, dtype=complex)


def shapes_from_point(pt: ParamPoint) -> Shapes:
    """Tetrahedron moduli (c2, d4, a5, b5, d5) of a 3-variable point."""
    spec = pt.spec
    if len(spec.variables) != 3:
        raise ValidationError(
            "shape recovery is defined for the 3-variable parametrization"
        )
    x, y, xi = (pt.values[v] for v in spec.variables)
    return Shapes(c2=y * xi, d4=x / xi, a5=x / y, b5=xi / x, d5=y / xi)


def reduced_residual(pt: ParamPoint):
    """Multiplicative residuals of the hyperbolicity equations.

    One entry per non-meridian variable: the critical-point condition
    exp(v dV/dv) = 1 rearranged as a rational equation LHS = RHS with
    the meridian power on the right, returned as LHS - RHS. For the
    built-in 5_2 potential this is exactly the displayed pair

        (1 - y/x)(1 - x/xi)/(1 - xi/x) - xi^2,
        (1 - y/x)/((1 - y/xi)(1 - 1/(y xi))) - xi^2.

    Branch-free, so it is the solver's acceptance residual.
    """
    spec = pt.spec
    meridian = spec.meridian
    out = []
    for v in spec.variables[:-1]:
        # integer exponent of v' contributed by the quadratic part of g_v
        quad_exp = {}
        for t in spec.quad_terms:
            c = t.coeff
            if t.var_a == v:
                quad_exp[t.var_b] = quad_exp.get(t.var_b, Fraction(0)) + c
            if t.var_b == v:
                quad_exp[t.var_a] = quad_exp.get(t.var_a, Fraction(0)) + c
        sigma = -1 if quad_exp.get(meridian, Fraction(0)) < 0 else 1
        lhs = 1 + 0j
        for t in spec.dilog_terms:
            a = t.argument.exponent(v)
            if not a:
                continue
            e = sigma * t.sign * a
            f = 1 - t.argument.evaluate(pt.values)
            if f == 0 and e < 0:
                raise SingularPointError("factor 1 - %s = 0" % t.argument)
            lhs *= f**e
        rhs = 1 + 0j
        for vp, c in quad_exp.items():
            e = sigma * c
            if e.denominator != 1:
                raise ValidationError(
                    "reduced residual needs integer quad exponents, got %s" % e
                )
            rhs *= pt.values[vp] ** int(e)
        out.append(lhs - rhs)
    return tuple(out)


def edge_residuals(sh: Shapes):
    """Edge-product residuals of the five-tetrahedron triangulation.

    Five equations read off the four display rows (the first row holds
    the two monomial identities), each returned as product - 1. The
    first two vanish identically for shapes derived from a ParamPoint;
    the rest vanish on the deformation space.
    """
    c2, d4, a5, b5, d5 = sh.as_tuple()
    for name, z in zip(("c2", "d4", "a5", "b5", "d5"), sh.as_tuple()):
        if abs(z) < _ZERO_TOL or abs(z - 1) < _ONE_TOL:
            raise DegenerateModulusError("modulus %s = %s is degenerate" % (name, z))
    e1 = d4 * b5 - 1
    e2 = a5 * b5 * d5 - 1
    e3 = (
        (c2 * a5 * (1 - 1 / d4) / (1 - d4))
        * ((1 - 1 / d5) * (1 - 1 / c2) * (1 - 1 / b5) / ((1 - a5) * (1 - b5)))
        - 1
    )
    e4 = (
        (c2 * (1 - 1 / a5) / ((1 - d5) * (1 - c2)))
        * ((1 - 1 / d5) * (1 - 1 / b5) / ((1 - d5) * (1 - a5) * (1 - d4)))
        - 1
    )
    e5 = (
        (d4 * (1 - 1 / a5) * (1 - 1 / d4) / (1 - b5))
        * (d5 * (1 - 1 / c2) / (1 - c2))
        - 1
    )
    return (e1, e2, e3, e4, e5)
