"""Complex special functions and branch-continued logarithms.

Public face of the dilogarithm kernel. Two interchangeable backends
implement the numerics: a compiled extension (_dilog_core) and a pure
Python fallback (_dilog_pure). The compiled one is preferred when it
imported cleanly; set KNOTPOT_PURE=1 to force the fallback, e.g. when
benchmarking one against the other.

On top of the kernel this module adds ContinuedLog, the record of a
particular branch of log w, and continue_log, the single primitive the
continuation solver uses to keep every logarithm on a consistent sheet
while a parameter point moves.
"""

import math
import os
from dataclasses import dataclass

from .errors import StepTooLargeError

if os.environ.get("KNOTPOT_PURE"):
    from . import _dilog_pure as _kernel
else:
    try:
        from . import _dilog_core as _kernel
    except ImportError:
        from . import _dilog_pure as _kernel

BACKEND: str = _kernel.BACKEND

principal_log = _kernel.principal_log
li2 = _kernel.li2
rogers_r = _kernel.rogers_r
bloch_wigner_d = _kernel.bloch_wigner_d

_TWO_PI = 2.0 * math.pi
_MAX_JUMP = math.pi / 2.0


@dataclass(frozen=True)
class ContinuedLog:
    """A chosen branch of log w: value = principal_log(w) + 2*pi*i*winding."""

    value: complex
    winding: int = 0


def continued(w) -> ContinuedLog:
    """ContinuedLog of w on the principal branch (winding 0)."""
    return ContinuedLog(principal_log(w), 0)


def continue_log(prev: ContinuedLog, w) -> ContinuedLog:
    """Branch of log w closest to prev, for small steps of w.

    Picks the winding that minimises the imaginary-part jump from
    prev.value. Raises StepTooLargeError when even the nearest branch
    is a quarter turn or more away; the continuation driver treats
    that as "halve the step and retry".
    """
    p = principal_log(w)
    k = round((prev.value.imag - p.imag) / _TWO_PI)
    value = complex(p.real, p.imag + _TWO_PI * k)
    if abs(value.imag - prev.value.imag) >= _MAX_JUMP:
        raise StepTooLargeError(
            "log continuation jump %.3f >= pi/2" % abs(value.imag - prev.value.imag)
        )
    return ContinuedLog(value, k)
