"""
Numerical oracles and comparison helpers shared by the tests.
"""

import mpmath

TAU = 0.8j
TAU_SKEW = 0.5 + 0.9j


def mp_theta(z: complex, tau: complex) -> complex:
    """theta(z) = -theta_1(pi z, e^{pi i tau}) from mpmath."""
    q = mpmath.exp(1j * mpmath.pi * tau)
    return complex(-mpmath.jtheta(1, mpmath.pi * z, q))


def mp_phi(z: complex, u: complex, tau: complex) -> complex:
    """Kronecker function from mpmath theta values."""
    q = mpmath.exp(1j * mpmath.pi * tau)
    d1 = mpmath.jtheta(1, 0, q, 1) * mpmath.pi
    num = d1 * mpmath.jtheta(1, mpmath.pi * (z + u), q)
    den = mpmath.jtheta(1, mpmath.pi * z, q) * mpmath.jtheta(1, mpmath.pi * u, q)
    return complex(num / den)


def close(a: complex, b: complex, tol: float) -> bool:
    """|a - b| <= tol * max(1, |a|, |b|)."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
