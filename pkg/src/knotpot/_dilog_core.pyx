# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled dilogarithm kernel.

Same algorithm and branch conventions as _dilog_pure (see that module
for the derivation); kept line-for-line parallel so the two backends
are interchangeable. The pure module is the reference; fix bugs there
first and mirror them here.
"""

from libc.math cimport M_PI, atan2, hypot, log

from .errors import DomainError

BACKEND = "compiled"

cdef double _PI2_6 = M_PI * M_PI / 6.0
cdef double _C2 = -0.25
cdef double _C3 = 1.0 / 36.0
cdef double[10] _ODD = [
    -1.0 / 3600.0,
    4.72411186696901e-06,
    -9.185773074661964e-08,
    1.8978869988971e-09,
    -4.0647616451442256e-11,
    8.921691020456452e-13,
    -1.9939295860721074e-14,
    4.518980029619918e-16,
    -1.0356517612181247e-17,
    2.395218621026187e-19,
]


cdef inline double complex _plog(double complex w):
    # principal log via hypot/atan2; atan2's -pi (negative real axis
    # approached with -0.0) is folded to +pi, matching _dilog_pure
    cdef double th = atan2(w.imag, w.real)
    if th == -M_PI:
        th = M_PI
    return log(hypot(w.real, w.imag)) + 1j * th


cdef double complex _series(double complex u):
    cdef double complex w = u * u
    cdef double complex s = 0
    cdef int k
    for k in range(9, -1, -1):
        s = s * w + _ODD[k]
    s = s * w * w * u
    return u + _C2 * w + _C3 * w * u + s


cdef double complex _li2(double complex z):
    cdef double rz, nz
    cdef double complex l, lz
    if z == 0:
        return 0
    if z == 1:
        return _PI2_6
    rz = z.real
    nz = rz * rz + z.imag * z.imag
    if nz < 1e-30:
        return z * (1.0 + 0.25 * z)
    if rz <= 0.5:
        if nz > 1.0:
            l = _plog(-z)
            return -_series(-_plog(1.0 - 1.0 / z)) - 0.5 * l * l - _PI2_6
        return _series(-_plog(1.0 - z))
    if nz <= 2.0 * rz:
        lz = _plog(z)
        return -_series(-lz) - lz * _plog(1.0 - z) + _PI2_6
    l = _plog(-z)
    return -_series(-_plog(1.0 - 1.0 / z)) - 0.5 * l * l - _PI2_6


def principal_log(w):
    """Principal branch of log w with Im in (-pi, pi]."""
    cdef double complex wc = w
    if wc == 0:
        raise DomainError("log of zero")
    return _plog(wc)


def li2(z):
    """Euler dilogarithm, principal branch, cut [1, inf) from below."""
    return _li2(z)


def rogers_r(z):
    """Rogers dilogarithm R(z) = Li2(z) + log z log(1-z)/2, principal logs."""
    cdef double complex zc = z
    if zc == 0 or zc == 1:
        raise DomainError("rogers_r singular at z = %r" % (z,))
    return _li2(zc) + 0.5 * _plog(zc) * _plog(1.0 - zc)


def bloch_wigner_d(z):
    """Bloch-Wigner function D(z); exactly 0.0 for real arguments."""
    cdef double complex zc = z
    cdef double complex om
    if zc == 0 or zc == 1:
        raise DomainError("bloch_wigner_d singular at z = %r" % (z,))
    if zc.imag == 0.0:
        return 0.0
    om = 1.0 - zc
    return _li2(zc).imag + log(hypot(zc.real, zc.imag)) * atan2(om.imag, om.real)
