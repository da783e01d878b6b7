"""Complex Gamma and Gauss hypergeometric 2F1, self-contained.

Gamma uses the Lanczos rational approximation (g = 7, 9 terms) with the
reflection formula for Re z < 1/2.  2F1 is summed as a power series for
small |z| and moved to the 1-z side by the standard connection formula
otherwise; only |z| <= 1 is supported, which is all the closed-form
scattering data needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NlsQuenchError


class PoleAtNonPositiveInteger(NlsQuenchError):
    pass


class ParameterPole(NlsQuenchError):
    pass


class NonConvergent(NlsQuenchError):
    pass


@dataclass(frozen=True)
class SpecFunConfig:
    series_tol: float = 1e-16
    max_terms: int = 4000

    def __post_init__(self):
        if not self.series_tol > 0:
            raise NlsQuenchError("series_tol must be positive")
        if self.max_terms < 1:
            raise NlsQuenchError("max_terms must be >= 1")


DEFAULT_CONFIG = SpecFunConfig()

# Lanczos g = 7 coefficients (Godfrey's table), double precision grade.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_2PI = 2.5066282746310002


def _is_nonpositive_integer(z: complex, tol: float = 1e-13) -> bool:
    return z.real <= 0.5 and abs(z.imag) < tol and abs(z.real - round(z.real)) < tol \
        and round(z.real) <= 0


def gamma_complex(z: complex) -> complex:
    """Gamma(z) for complex z off the poles at 0, -1, -2, ..."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleAtNonPositiveInteger(f"Gamma pole at z = {z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return np.pi / (np.sin(np.pi * z) * gamma_complex(1.0 - z))
    z = z - 1.0
    acc = _LANCZOS_P[0]
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc = acc + p / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (z + 0.5) * np.exp(-t) * acc


def _series_2f1(a, b, c, z, cfg: SpecFunConfig):
    """Plain power series; valid for |z| < 1 (terminating cases anywhere)."""
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    for n in range(cfg.max_terms):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) <= cfg.series_tol * max(1.0, abs(total)):
            return total
        if abs(term) > 1e100:
            raise NonConvergent(f"2F1 series diverges at z = {z}")
    if abs(term) > 1e-8 * max(1.0, abs(total)):
        raise NonConvergent(
            f"2F1 series did not converge in {cfg.max_terms} terms at z = {z}"
        )
    return total


def _terminates(a, tol=1e-13) -> bool:
    return abs(a.imag) < tol and a.real <= tol and abs(a.real - round(a.real)) < tol


def hyp2f1(a: complex, b: complex, c: complex, z: complex,
           cfg: SpecFunConfig = DEFAULT_CONFIG) -> complex:
    """Gauss 2F1(a, b; c; z) on |z| <= 1.

    z = 1 requires Re(c - a - b) > 0; the z -> 1 - z connection handles the
    |z| > 1/2 region (and degenerates for integer c - a - b, in which case
    the raw series is used as a fallback for |z| < 1).
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpositive_integer(c):
        raise ParameterPole(f"2F1 parameter c = {c} is a non-positive integer")
    if z == 0:
        return 1.0 + 0.0j
    if _terminates(a) or _terminates(b):
        return _series_2f1(a, b, c, z, cfg)
    if abs(z) > 1.0 + 1e-14:
        raise NonConvergent(f"|z| = {abs(z):.6f} > 1 is outside the supported domain")
    if abs(z) <= 0.5:
        return _series_2f1(a, b, c, z, cfg)

    s = c - a - b
    if z == 1.0:
        if s.real <= 0:
            raise NonConvergent("2F1 at z = 1 needs Re(c - a - b) > 0")
        return (gamma_complex(c) * gamma_complex(s)
                / (gamma_complex(c - a) * gamma_complex(c - b)))
    w = 1.0 - z
    degenerate = abs(s - round(s.real)) < 1e-8 and abs(s.imag) < 1e-8
    if abs(w) > 0.75 or degenerate:
        # the 1-z connection is useless far from z = 1 (its series would
        # diverge) and its coefficients blow up for integer c - a - b; the
        # raw series still converges, if slowly, anywhere inside the disc
        return _series_2f1(a, b, c, z, cfg)
    t1 = (gamma_complex(c) * gamma_complex(s)
          / (gamma_complex(c - a) * gamma_complex(c - b))
          * _series_2f1(a, b, 1.0 - s, w, cfg))
    t2 = (gamma_complex(c) * gamma_complex(-s)
          / (gamma_complex(a) * gamma_complex(b))
          * w ** s * _series_2f1(c - a, c - b, 1.0 + s, w, cfg))
    return t1 + t2
