"""
Elliptic special functions for Elliptica.

This module evaluates the odd theta function and everything built on it:
the Eisenstein functions E1 and E2, the Weierstrass function and its
derivative, and the Kronecker function together with its first and mixed
derivatives. Two independent routes for the Kronecker function are also
provided (a bilateral q-series and a weighted lattice double series); they
serve as oracles for the theta-ratio route.

All functions are pure: arguments are Python complex numbers, the modulus
tau must satisfy Im tau >= the configured minimum, and values are returned
in double precision.
"""

import cmath
import logging
import math
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.config import config
from ..core.exceptions import DomainError, PoleError, TruncationError

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi


def e2pi(x: complex) -> complex:
    """Return exp(2 pi i x)."""
    return cmath.exp(TWO_PI_I * x)


def check_tau(tau: complex) -> complex:
    """
    Validate a modulus and return it as a Python complex.

    Raises:
        DomainError: If Im tau is below the configured minimum
    """
    tau = complex(tau)
    if tau.imag < config.theta.min_im_tau:
        raise DomainError(
            f"Im tau must be at least {config.theta.min_im_tau}, got {tau}",
            parameter="tau",
            value=tau,
        )
    return tau


def reduce_to_cell(z: complex, tau: complex) -> Tuple[complex, int, int]:
    """
    Reduce z into the centred fundamental cell.

    Returns:
        Tuple[complex, int, int]: (z0, m, n) with z = z0 + m + n*tau,
            |Im z0| <= Im tau / 2 and |Re z0| <= 1/2 (up to rounding).
    """
    n = int(round(z.imag / tau.imag))
    shifted = z - n * tau
    m = int(round(shifted.real))
    return shifted - m, m, n


def lattice_distance(z: complex, tau: complex) -> float:
    """Distance from z to the lattice Z + tau Z."""
    z0, _, _ = reduce_to_cell(complex(z), complex(tau))
    return min(abs(z0 - a - b * tau) for a in (-1, 0, 1) for b in (-1, 0, 1))


def _guard_pole(z: complex, tau: complex, name: str):
    distance = lattice_distance(z, tau)
    if distance < config.theta.pole_tolerance:
        raise PoleError(
            f"{name} = {z} lies on the lattice Z + tau Z (distance {distance:.3e})",
            argument=z,
            distance=distance,
        )


@lru_cache(maxsize=65536)
def _theta_jet_cached(z: complex, tau: complex, max_terms: int, tolerance: float) -> Tuple[complex, ...]:
    # Pair k with -k-1, so n = k + 1/2 and -n share exp(pi i tau n^2).
    n = np.arange(max_terms, dtype=float) + 0.5
    quad = 1j * math.pi * tau * n * n
    lin = TWO_PI_I * (z + 0.5) * n
    plus = np.exp(quad + lin)
    minus = np.exp(quad - lin)
    w = TWO_PI_I * n

    jet = []
    for order in range(4):
        terms = w ** order * (plus + (-1) ** order * minus)
        partial = np.cumsum(terms)
        small = np.abs(terms) < tolerance * (1.0 + np.abs(partial))
        settled = np.flatnonzero(small[:-1] & small[1:])
        if settled.size == 0:
            raise TruncationError(
                f"Theta series did not converge in {max_terms} terms (z={z}, tau={tau}, order {order})",
                last_term=float(abs(terms[-1])),
                terms_used=max_terms,
            )
        stop = int(settled[0]) + 1
        jet.append(complex(partial[stop]))
    return tuple(jet)


def theta_jet(z: complex, tau: complex) -> Tuple[complex, complex, complex, complex]:
    """
    Evaluate the odd theta function and its first three z-derivatives.

    The series is the sum over k of exp(pi i tau (k+1/2)^2 + 2 pi i (z+1/2)(k+1/2)),
    differentiated term by term and truncated once the pair terms stay below
    ``term_tolerance * (1 + |partial sum|)`` for two consecutive k.

    Args:
        z (complex): Argument on the curve
        tau (complex): Modulus, Im tau >= min_im_tau

    Returns:
        Tuple of theta, theta', theta'', theta''' at z.

    Raises:
        DomainError: If tau is outside the supported half-plane
        TruncationError: If the term budget is exhausted
    """
    tau = check_tau(tau)
    return _theta_jet_cached(complex(z), tau, config.theta.max_terms, config.theta.term_tolerance)


def theta(z: complex, tau: complex) -> complex:
    """Odd theta function; theta(-z) = -theta(z) and theta(0) = 0."""
    return theta_jet(z, tau)[0]


def theta_derivatives(tau: complex) -> Tuple[complex, complex]:
    """Return (theta'(0), theta'''(0)) from the term-wise differentiated series."""
    jet = theta_jet(0j, tau)
    return jet[1], jet[3]


def _reduced_jet(z: complex, tau: complex, name: str):
    tau = check_tau(tau)
    z = complex(z)
    _guard_pole(z, tau, name)
    z0, _, n = reduce_to_cell(z, tau)
    return z0, n, theta_jet(z0, tau)


def e1(z: complex, tau: complex) -> complex:
    """First Eisenstein function E1 = theta'/theta; E1(z + tau) = E1(z) - 2 pi i."""
    _, n, (t0, t1, _, _) = _reduced_jet(z, tau, "z")
    return t1 / t0 - TWO_PI_I * n


def e2(z: complex, tau: complex) -> complex:
    """Second Eisenstein function E2 = -dE1/dz, doubly periodic."""
    _, _, (t0, t1, t2, _) = _reduced_jet(z, tau, "z")
    ratio = t1 / t0
    return ratio * ratio - t2 / t0


def wp(z: complex, tau: complex) -> complex:
    """Weierstrass function, E2 shifted by theta'''(0) / (3 theta'(0))."""
    d1, d3 = theta_derivatives(tau)
    return e2(z, tau) + d3 / (3.0 * d1)


def wp_prime(z: complex, tau: complex) -> complex:
    """Derivative of the Weierstrass function, -E1''(z)."""
    _, _, (t0, t1, t2, t3) = _reduced_jet(z, tau, "z")
    ratio = t1 / t0
    return -(t3 / t0 - 3.0 * ratio * t2 / t0 + 2.0 * ratio ** 3)


def kronecker_phi_jet(z: complex, u: complex, tau: complex) -> Tuple[complex, complex, complex, complex]:
    """
    Kronecker function and its derivatives from shared theta jets.

    Both arguments are first reduced into the fundamental cell; the
    quasi-periodicity phases are applied to the jet afterwards. The
    closed forms stay finite where z + u hits the lattice (phi vanishes there).

    Args:
        z (complex): First argument, off the lattice
        u (complex): Second argument, off the lattice
        tau (complex): Modulus

    Returns:
        Tuple of (phi, d phi/dz, d phi/du, d^2 phi/dz du).

    Raises:
        PoleError: If z or u lies on the lattice
    """
    tau = check_tau(tau)
    z, u = complex(z), complex(u)
    _guard_pole(z, tau, "z")
    _guard_pole(u, tau, "u")

    z0, _, nz = reduce_to_cell(z, tau)
    u0, _, nu = reduce_to_cell(u, tau)

    c = theta_derivatives(tau)[0]
    a0, a1, a2, _ = theta_jet(z0 + u0, tau)
    b0, b1, _, _ = theta_jet(z0, tau)
    c0, c1, _, _ = theta_jet(u0, tau)

    bc = b0 * c0
    phi0 = c * a0 / bc
    phi0_u = c * (a1 * c0 - a0 * c1) / (bc * c0)
    phi0_z = c * (a1 * b0 - a0 * b1) / (bc * b0)
    phi0_zu = c * (
        a2 / bc
        - a1 * c1 / (bc * c0)
        - a1 * b1 / (bc * b0)
        + a0 * b1 * c1 / (bc * bc)
    )

    # phi(z0 + nz tau, u0 + nu tau) = e(-nz u - nu z0) phi(z0, u0)
    phase = e2pi(-nz * u - nu * z0)
    kz = TWO_PI_I * nu
    ku = TWO_PI_I * nz
    phi = phase * phi0
    phi_z = phase * (phi0_z - kz * phi0)
    phi_u = phase * (phi0_u - ku * phi0)
    phi_zu = phase * (phi0_zu - ku * phi0_z - kz * phi0_u + kz * ku * phi0)
    return phi, phi_z, phi_u, phi_zu


def kronecker_phi(z: complex, u: complex, tau: complex) -> complex:
    """Kronecker function theta'(0) theta(z+u) / (theta(z) theta(u))."""
    return kronecker_phi_jet(z, u, tau)[0]


def kronecker_phi_du(z: complex, u: complex, tau: complex) -> complex:
    """d phi/du = phi(z,u) (E1(z+u) - E1(u)), evaluated without dividing by phi."""
    return kronecker_phi_jet(z, u, tau)[2]


def kronecker_phi_dz(z: complex, u: complex, tau: complex) -> complex:
    """d phi/dz = phi(z,u) (E1(z+u) - E1(z))."""
    return kronecker_phi_jet(z, u, tau)[1]


def kronecker_phi_dzdu(z: complex, u: complex, tau: complex) -> complex:
    """Mixed derivative; by the heat equation it equals 2 pi i d phi/d tau."""
    return kronecker_phi_jet(z, u, tau)[3]


def _annulus_check(name: str, x: complex, q_abs: float):
    if not (q_abs < abs(x) <= 1.0 + 1e-15):
        raise DomainError(
            f"{name} = {x} is outside the annulus |q| < |{name}| <= 1 (|q| = {q_abs:.3e})",
            parameter=name,
            value=x,
        )
    if abs(x - 1.0) < config.theta.pole_tolerance:
        raise DomainError(f"{name} = 1 is a pole of the q-series", parameter=name, value=x)


def kronecker_q_series(s: complex, t: complex, q: complex, tolerance: float = 1e-17) -> complex:
    """
    Evaluate the bilateral q-series g(s, t | q) in the common annulus.

    The sum over n of t^n / (q^n s - 1) is evaluated in its rearranged form

        1 - 1/(1-t) - 1/(1-s) + sum_{i,n>=1} (s^-i t^-n - s^i t^n) q^(i n),

    which converges for |q| < |s|, |t| <= 1 with s, t != 1. The Kronecker
    function is recovered as phi(z, u) = 2 pi i g(e(u), e(z) | e(tau)).

    Args:
        s (complex): Multiplicative second argument
        t (complex): Multiplicative first argument
        q (complex): Nome e(tau), 0 < |q| < 1
        tolerance (float): Target bound on the truncated tail

    Returns:
        complex: g(s, t | q)

    Raises:
        DomainError: If s or t leaves the annulus
        TruncationError: If more than ``q_series_max_terms`` terms per index are needed
    """
    s, t, q = complex(s), complex(t), complex(q)
    q_abs = abs(q)
    if not 0.0 < q_abs < 1.0:
        raise DomainError(f"Nome must satisfy 0 < |q| < 1, got {q}", parameter="q", value=q)
    _annulus_check("s", s, q_abs)
    _annulus_check("t", t, q_abs)

    rho = max(q_abs / abs(t), q_abs / abs(s))
    terms = int(math.ceil(math.log(tolerance * q_abs) / math.log(rho))) + 1
    max_terms = config.theta.q_series_max_terms
    if terms > max_terms:
        raise TruncationError(
            f"q-series needs {terms} terms per index (limit {max_terms}); move s, t away from |q|",
            last_term=rho ** max_terms,
            terms_used=max_terms,
        )

    idx = np.arange(1, terms + 1, dtype=float)
    i, n = np.meshgrid(idx, idx, indexing="ij")
    log_s, log_t, log_q = cmath.log(s), cmath.log(t), cmath.log(q)
    weight = i * n * log_q
    tail = np.exp(weight - i * log_s - n * log_t) - np.exp(weight + i * log_s + n * log_t)
    return complex(1.0 - 1.0 / (1.0 - t) - 1.0 / (1.0 - s) + tail.sum())


def kronecker_q_series_partial(s: complex, t: complex, q: complex, n_max: int) -> complex:
    """Raw bilateral truncation sum_{|n| <= n_max} t^n / (q^n s - 1)."""
    n = np.arange(-n_max, n_max + 1, dtype=float)
    log_t, log_q = cmath.log(complex(t)), cmath.log(complex(q))
    return complex(np.sum(np.exp(n * log_t) / (np.exp(n * log_q) * s - 1.0)))


def q_series_delta_partial(t: complex, n_max: int) -> complex:
    """Truncated formal delta sum_{|n| <= n_max} t^n."""
    n = np.arange(-n_max, n_max + 1, dtype=float)
    return complex(np.sum(np.exp(n * cmath.log(complex(t)))))


def lattice_coordinates(u: complex, tau: complex) -> Tuple[float, float]:
    """Real coordinates (u1, u2) with u = u1 + u2 tau."""
    u2 = u.imag / tau.imag
    return u.real - u2 * tau.real, u2


def kronecker_double_series(z: complex, u: complex, tau: complex, terms: Optional[int] = None) -> complex:
    """
    Partial sum of the lattice double series S(z, u | tau).

    Sums chi_u(m + n tau) / (z + m + n tau) over the square |m|, |n| <= M
    with chi_u(m + n tau) = e(-m u2 + n u1). Rows in the tau direction carry
    Fejer weights 1 - |n|/(M+1), because the row sums only converge in the
    Cesaro sense when u2 is an integer. The limit is e(u2 z) phi(z, u); the
    truncation error decays like 1/M.

    Args:
        z (complex): First argument, off the lattice
        u (complex): Character parameter, not congruent to 0
        tau (complex): Modulus
        terms (int, optional): M; defaults to ``double_series_terms``

    Returns:
        complex: The weighted partial sum S_M(z, u)

    Raises:
        DomainError: If u is congruent to 0 modulo the lattice
        PoleError: If z lies on the lattice
    """
    tau = check_tau(tau)
    z, u = complex(z), complex(u)
    if lattice_distance(u, tau) < config.theta.pole_tolerance:
        raise DomainError("Double series requires u not congruent to 0", parameter="u", value=u)
    _guard_pole(z, tau, "z")

    size = terms or config.theta.double_series_terms
    u1, u2 = lattice_coordinates(u, tau)
    idx = np.arange(-size, size + 1, dtype=float)
    m, n = np.meshgrid(idx, idx, indexing="ij")
    weights = 1.0 - np.abs(n) / (size + 1.0)
    character = np.exp(TWO_PI_I * (-m * u2 + n * u1))
    total = np.sum(weights * character / (z + m + n * tau))
    logger.debug(f"Double series at z={z}, u={u}, M={size}: {total}")
    return complex(total)


def richardson(values: Sequence, ratio: float = 2.0, power: int = 2):
    """
    Richardson extrapolation of a sequence of estimates.

    Args:
        values (Sequence): Estimates at steps h, h/ratio, h/ratio^2, ...
            (scalars or numpy arrays)
        ratio (float): Step reduction factor between estimates
        power (int): Exponent step of the error expansion (2 for central
            differences, 1 for one-sided limits)

    Returns:
        The extrapolated estimate (same type as the entries).
    """
    table = [np.asarray(v, dtype=complex) for v in values]
    level = 1
    while len(table) > 1:
        factor = ratio ** (power * level)
        table = [(factor * table[k + 1] - table[k]) / (factor - 1.0) for k in range(len(table) - 1)]
        level += 1
    result = table[0]
    return complex(result) if result.ndim == 0 else result
