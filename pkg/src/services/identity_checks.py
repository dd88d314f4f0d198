"""
Registered identity checks.

Every function below maps one functional identity of the Kronecker
function, the R-matrix or the Painleve VI Lax pair to a nonnegative
residual and is registered in the global registry with its sampling
rules. Importing this module populates the registry.
"""

import cmath
import logging
import math
from functools import lru_cache
from typing import Callable, Dict, Iterable, List

import numpy as np
from scipy.linalg import expm

from ..core.config import config
from .elliptic import (
    TWO_PI_I,
    e1,
    e2,
    e2pi,
    kronecker_double_series,
    kronecker_phi,
    kronecker_phi_du,
    kronecker_phi_dz,
    kronecker_phi_dzdu,
    kronecker_q_series,
    kronecker_q_series_partial,
    lattice_coordinates,
    lattice_distance,
    q_series_delta_partial,
    richardson,
    wp,
    wp_prime,
)
from .identities import Sample, registry, relative_residual
from .matrixalg import (
    LatticeIndex,
    TensorLayout,
    gen_lambda,
    gen_q,
    kappa,
    max_abs,
    permutation_p,
    product_scale,
    t_basis,
    tensor_embed,
)
from .painleve import (
    HALF_PERIOD_INDICES,
    PVIConstants,
    PVIState,
    check_zero_curvature_identities,
    fit_diagonal_defect,
    monodromy_residual,
    pvi_rhs,
    scalar_pair_identities,
    shifted_points,
)
from .rmatrix import (
    CMLaxParams,
    HalfPeriods,
    RParams,
    classical_m,
    classical_r,
    cm_block_lambda,
    cm_block_q,
    cm_block_z,
    cm_lax,
    f_matrix,
    phi_twisted,
    quantum_r,
    quantum_r_dhbar,
    quantum_r_dtau_fd,
    quantum_r_dz_dhbar,
    r_zero,
    shifted_f,
    shifted_f_dhbar,
    shifted_r,
    unitarity_scalar,
)

logger = logging.getLogger(__name__)

SCALAR = config.sampling.scalar_tolerance
ALGEBRAIC = config.sampling.algebraic_tolerance
FD = config.sampling.fd_tolerance
ORDER = config.sampling.order_tolerance
SERIES = config.sampling.series_tolerance

MONODROMY_TOLERANCE = 1e-8


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _residual(lhs, rhs, *terms) -> float:
    """relative_residual scaled by the largest of lhs, rhs and the given terms."""
    scale = max([max_abs(lhs), max_abs(rhs)] + [max_abs(t) for t in terms])
    return relative_residual(lhs, rhs, scale)


def _products(*pairs) -> float:
    return max(product_scale(a, b) for a, b in pairs)


def _scaled(lhs, rhs, scale: float) -> float:
    return relative_residual(lhs, rhs, max(scale, max_abs(lhs), max_abs(rhs)))


def _ray(t: float) -> complex:
    return t * cmath.exp(1j * config.rmatrix.limit_ray_angle)


def _ray_limit(fn: Callable[[complex], object], levels: int = 4):
    """Limit of fn at 0 along a ray: Richardson table over t, t/2, ..., power 1."""
    t0 = config.rmatrix.limit_step
    return richardson([fn(_ray(t0 / 2 ** k)) for k in range(levels)], ratio=2.0, power=1)


def _order_residual(coarse: float, fine: float, order: int) -> float:
    """|p - order| / order for the observed decay order p = log2(coarse / fine)."""
    if fine <= 0.0 or coarse <= 0.0:
        return math.inf
    return abs(math.log2(coarse / fine) - order) / order


def _omegas(n: int, tau: complex) -> List[complex]:
    return [alpha.omega(tau) for alpha in LatticeIndex.all(n)]


def _shifted(s: Sample, *hbars: complex) -> Iterable[complex]:
    """hbar + omega_alpha for every alpha and every given hbar."""
    for hbar in hbars:
        for omega in _omegas(s.n, s.tau):
            yield hbar + omega


def _r(a: int, b: int, s: Sample, hbar: complex, z: complex, layout: TensorLayout = None) -> np.ndarray:
    return quantum_r(a, b, RParams(s.n, s.tau, hbar, z), layout)


def _embed_pair(left: np.ndarray, right: np.ndarray, n: int) -> np.ndarray:
    layout = TensorLayout(2, n)
    return tensor_embed(left, 1, layout) @ tensor_embed(right, 2, layout)


def _inv(m: np.ndarray) -> np.ndarray:
    return np.linalg.inv(m)


# ---------------------------------------------------------------------------
# scalar suite
# ---------------------------------------------------------------------------

@registry.check(
    "scalar_fay",
    anchor="phi(x,u) phi(y,w) = phi(x-y,u) phi(y,u+w) + phi(y-x,w) phi(x,u+w)",
    arity=("x", "y", "u", "w"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["x"], s["y"], s["u"], s["w"], s["x"] - s["y"], s["u"] + s["w"],
                      s["x"] + s["u"], s["y"] + s["w"]],
)
def scalar_fay(s: Sample) -> float:
    x, y, u, w, tau = s["x"], s["y"], s["u"], s["w"], s.tau
    lhs = kronecker_phi(x, u, tau) * kronecker_phi(y, w, tau)
    t1 = kronecker_phi(x - y, u, tau) * kronecker_phi(y, u + w, tau)
    t2 = kronecker_phi(y - x, w, tau) * kronecker_phi(x, u + w, tau)
    return _residual(lhs, t1 + t2, t1, t2)


@registry.check(
    "scalar_fay_deg1",
    anchor="phi(x,z) phi(x,w) = phi(x,z+w) (E1(x) + E1(z) + E1(w) - E1(x+z+w))",
    arity=("x", "z", "w"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["x"], s["z"], s["w"], s["z"] + s["w"], s["x"] + s["z"] + s["w"],
                      s["x"] + s["z"], s["x"] + s["w"]],
)
def scalar_fay_deg1(s: Sample) -> float:
    x, z, w, tau = s["x"], s["z"], s["w"], s.tau
    lhs = kronecker_phi(x, z, tau) * kronecker_phi(x, w, tau)
    eisenstein = [e1(x, tau), e1(z, tau), e1(w, tau), -e1(x + z + w, tau)]
    phi = kronecker_phi(x, z + w, tau)
    return _residual(lhs, phi * sum(eisenstein), abs(phi) * max(abs(e) for e in eisenstein))


@registry.check(
    "scalar_fay_deg2",
    anchor="phi(x,z) phi(y,z) = phi(x+y,z) (E1(x) + E1(y) + E1(z) - E1(x+y+z))",
    arity=("x", "y", "z"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["x"], s["y"], s["z"], s["x"] + s["y"], s["x"] + s["y"] + s["z"],
                      s["x"] + s["z"], s["y"] + s["z"]],
)
def scalar_fay_deg2(s: Sample) -> float:
    x, y, z, tau = s["x"], s["y"], s["z"], s.tau
    lhs = kronecker_phi(x, z, tau) * kronecker_phi(y, z, tau)
    eisenstein = [e1(x, tau), e1(y, tau), e1(z, tau), -e1(x + y + z, tau)]
    phi = kronecker_phi(x + y, z, tau)
    return _residual(lhs, phi * sum(eisenstein), abs(phi) * max(abs(e) for e in eisenstein))


@registry.check(
    "scalar_fay_deg3",
    anchor="phi(x,z) phi(x,-z) = E2(x) - E2(z) = wp(x) - wp(z)",
    arity=("x", "z"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["x"], s["z"], s["x"] + s["z"], s["x"] - s["z"]],
)
def scalar_fay_deg3(s: Sample) -> float:
    x, z, tau = s["x"], s["z"], s.tau
    lhs = kronecker_phi(x, z, tau) * kronecker_phi(x, -z, tau)
    via_e2 = e2(x, tau) - e2(z, tau)
    via_wp = wp(x, tau) - wp(z, tau)
    scale = max(abs(e2(x, tau)), abs(e2(z, tau)))
    return max(_scaled(lhs, via_e2, scale), _scaled(lhs, via_wp, scale))


@registry.check(
    "scalar_symmetry",
    anchor="phi(z,u) = phi(u,z)",
    arity=("z", "u"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
)
def scalar_symmetry(s: Sample) -> float:
    return _residual(kronecker_phi(s["z"], s["u"], s.tau), kronecker_phi(s["u"], s["z"], s.tau))


@registry.check(
    "scalar_parity",
    anchor="phi(-z,-u) = -phi(z,u), E1(-z) = -E1(z), E2(-z) = E2(z)",
    arity=("z", "u"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
)
def scalar_parity(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    return max(
        _residual(kronecker_phi(-z, -u, tau), -kronecker_phi(z, u, tau)),
        _residual(e1(-z, tau), -e1(z, tau)),
        _residual(e2(-z, tau), e2(z, tau)),
    )


@registry.check(
    "scalar_qp",
    anchor="phi(z+1,u) = phi(z,u), phi(z+tau,u) = e(-u) phi(z,u), E1(z+tau) = E1(z) - 2 pi i, E2 periodic",
    arity=("z", "u"),
    tolerance=SCALAR,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
)
def scalar_qp(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    phi = kronecker_phi(z, u, tau)
    return max(
        _residual(kronecker_phi(z + 1, u, tau), phi),
        _residual(kronecker_phi(z + tau, u, tau), e2pi(-u) * phi),
        _residual(e1(z + 1, tau), e1(z, tau)),
        _residual(e1(z + tau, tau), e1(z, tau) - TWO_PI_I),
        _residual(e2(z + 1, tau), e2(z, tau)),
        _residual(e2(z + tau, tau), e2(z, tau)),
    )


@registry.check(
    "scalar_residue",
    anchor="res_{z=0} phi(z,u) = res_{u=0} phi(z,u) = res_{z=0} E1(z) = 1",
    arity=("z", "u"),
    tolerance=FD,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"]],
)
def scalar_residue(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    limits = [
        _ray_limit(lambda t: t * kronecker_phi(t, u, tau)),
        _ray_limit(lambda t: t * kronecker_phi(z, t, tau)),
        _ray_limit(lambda t: t * e1(t, tau)),
    ]
    return max(abs(limit - 1.0) for limit in limits)


@registry.check(
    "scalar_heat",
    anchor="2 pi i d_tau phi(z,u) = d_z d_u phi(z,u)",
    arity=("z", "u"),
    tolerance=FD,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
)
def scalar_heat(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    h0 = config.rmatrix.fd_step

    def estimate(h):
        real = (kronecker_phi(z, u, tau + h) - kronecker_phi(z, u, tau - h)) / (2 * h)
        imag = (kronecker_phi(z, u, tau + 1j * h) - kronecker_phi(z, u, tau - 1j * h)) / (2j * h)
        return (real + imag) / 2

    dtau = richardson([estimate(h0), estimate(h0 / 2)])
    return _residual(TWO_PI_I * dtau, kronecker_phi_dzdu(z, u, tau))


@registry.check(
    "scalar_derivatives",
    anchor="d_u phi = phi (E1(z+u) - E1(u)), d_z phi = phi (E1(z+u) - E1(z))",
    arity=("z", "u"),
    tolerance=ALGEBRAIC,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
)
def scalar_derivatives(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    phi = kronecker_phi(z, u, tau)
    zu, eu, ez = e1(z + u, tau), e1(u, tau), e1(z, tau)
    scale = abs(phi) * max(abs(zu), abs(eu), abs(ez))
    return max(
        _scaled(kronecker_phi_du(z, u, tau), phi * (zu - eu), scale),
        _scaled(kronecker_phi_dz(z, u, tau), phi * (zu - ez), scale),
    )


@registry.check(
    "scalar_local_expansion",
    anchor="phi(z,u) = 1/z + E1(u) + z/2 (E1(u)^2 - wp(u)) + O(z^2)",
    arity=("u",),
    tolerance=ORDER,
    n_values=(1,),
    guards=lambda s: [s["u"]],
)
def scalar_local_expansion(s: Sample) -> float:
    u, tau = s["u"], s.tau
    e, p = e1(u, tau), wp(u, tau)

    def remainder(t):
        z = _ray(t)
        return abs(kronecker_phi(z, u, tau) - 1 / z - e - z / 2 * (e * e - p))

    return _order_residual(remainder(1e-2), remainder(5e-3), 2)


# ---------------------------------------------------------------------------
# alternative evaluation routes
# ---------------------------------------------------------------------------

def _q_series_domain(s: Sample) -> bool:
    margin = s.tau.imag - 0.1
    return s["z"].imag <= margin and s["u"].imag <= margin


@registry.check(
    "route_q_series",
    anchor="phi(z,u) = 2 pi i g(e(u), e(z) | e(tau))",
    arity=("z", "u"),
    tolerance=1e-12,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
    accept=_q_series_domain,
)
def route_q_series(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    series = TWO_PI_I * kronecker_q_series(e2pi(u), e2pi(z), e2pi(tau))
    return _residual(kronecker_phi(z, u, tau), series)


def _double_series_domain(s: Sample) -> bool:
    _, u2 = lattice_coordinates(s["u"], s.tau)
    return (0.15 <= u2 <= 0.85
            and lattice_distance(s["u"], s.tau) >= 0.2
            and lattice_distance(s["z"], s.tau) >= 0.1
            and lattice_distance(s["z"] + s["u"], s.tau) >= 0.1)


@registry.check(
    "route_double_series",
    anchor="S_M(z,u) -> e(u2 z) phi(z,u) on symmetric squares",
    arity=("z", "u"),
    tolerance=SERIES,
    n_values=(1,),
    max_samples=5,
    accept=_double_series_domain,
)
def route_double_series(s: Sample) -> float:
    z, u, tau = s["z"], s["u"], s.tau
    _, u2 = lattice_coordinates(u, tau)
    target = e2pi(u2 * z) * kronecker_phi(z, u, tau)
    return abs(kronecker_double_series(z, u, tau) - target) / abs(target)


@registry.check(
    "qseries_symmetry",
    anchor="g(s,t|q) = g(t,s|q)",
    arity=("z", "u"),
    tolerance=1e-12,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
    accept=_q_series_domain,
)
def qseries_symmetry(s: Sample) -> float:
    a, b, q = e2pi(s["u"]), e2pi(s["z"]), e2pi(s.tau)
    return _residual(kronecker_q_series(a, b, q), kronecker_q_series(b, a, q))


QSERIES_TRUNCATION = 8


@registry.check(
    "qseries_difference",
    anchor="truncation consistency: s g_K(s,tq|q) - g_K(s,t|q) = sum_{|n|<=K} t^n for the K-term partial sums",
    arity=("z", "u"),
    tolerance=1e-12,
    n_values=(1,),
    guards=lambda s: [s["z"], s["u"], s["z"] + s["u"]],
    accept=_q_series_domain,
)
def qseries_difference(s: Sample) -> float:
    a, b, q = e2pi(s["u"]), e2pi(s["z"]), e2pi(s.tau)
    k = QSERIES_TRUNCATION
    shifted = a * kronecker_q_series_partial(a, b * q, q, k)
    plain = kronecker_q_series_partial(a, b, q, k)
    delta = q_series_delta_partial(b, k)
    return _residual(shifted - plain, delta, shifted, plain)


# ---------------------------------------------------------------------------
# matrix algebra
# ---------------------------------------------------------------------------

@registry.check(
    "kappa_sum",
    anchor="sum_alpha kappa_{alpha,gamma}^2 = N^2 delta_{gamma,0}",
    tolerance=ALGEBRAIC,
    n_values=(1, 2, 3, 4, 5),
    integers={"g1": (-5, 9), "g2": (-5, 9)},
)
def kappa_sum(s: Sample) -> float:
    n, gamma = s.n, (s["g1"], s["g2"])
    total = sum(kappa(alpha, gamma, n) ** 2 for alpha in LatticeIndex.all(n))
    target = n * n if gamma[0] % n == 0 and gamma[1] % n == 0 else 0
    return abs(total - target) / (n * n)


@registry.check(
    "heisenberg_relation",
    anchor="e(g1 g2 / N) Q^g1 Lambda^g2 = Lambda^g2 Q^g1",
    tolerance=ALGEBRAIC,
    n_values=(1, 2, 3, 4, 5),
    integers={"g1": (0, 4), "g2": (0, 4)},
)
def heisenberg_relation(s: Sample) -> float:
    n, g1, g2 = s.n, s["g1"], s["g2"]
    q = np.linalg.matrix_power(gen_q(n), g1)
    lam = np.linalg.matrix_power(gen_lambda(n), g2)
    return _residual(e2pi(g1 * g2 / n) * q @ lam, lam @ q)


def _trace_sign(gamma, n: int) -> int:
    """tr T_gamma / N for gamma = N b on the lattice, else 0."""
    if gamma[0] % n or gamma[1] % n:
        return 0
    b1, b2 = gamma[0] // n, gamma[1] // n
    return -1 if (n * b1 * b2) % 2 else 1


@registry.check(
    "trace_pairing",
    anchor="tr(T_alpha T_beta) = N kappa_{alpha,beta} delta_{alpha+beta,0}",
    tolerance=ALGEBRAIC,
    n_values=(1, 2, 3, 4, 5),
    integers={"a1": (-3, 5), "a2": (-3, 5), "b1": (-3, 5), "b2": (-3, 5), "k1": (-1, 1), "k2": (-1, 1)},
)
def trace_pairing(s: Sample) -> float:
    n = s.n
    alpha = (s["a1"], s["a2"])
    partners = [(s["b1"], s["b2"]), (-alpha[0] + n * s["k1"], -alpha[1] + n * s["k2"])]
    worst = 0.0
    for beta in partners:
        trace = np.trace(t_basis(alpha, n) @ t_basis(beta, n))
        total = (alpha[0] + beta[0], alpha[1] + beta[1])
        expected = n * kappa(alpha, beta, n) * _trace_sign(total, n)
        worst = max(worst, abs(trace - expected) / n)
    return worst


@registry.check(
    "prop31_components",
    anchor="(1/N) sum_alpha kappa_{alpha,gamma}^2 phi_alpha(N hbar, omega_alpha + z/N) = phi_gamma(z, omega_gamma + hbar)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    integers={"g1": (-2, 4), "g2": (-2, 4)},
    guards=lambda s: [s["z"], s.n * s["hbar"], *_shifted(s, s["hbar"], s["z"] / s.n)],
)
def prop31_components(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    params = RParams(n, tau, hbar, z)
    gamma = (s["g1"], s["g2"])
    omega_gamma = (gamma[0] + gamma[1] * tau) / n

    def twisted(u, v):
        # phi_gamma with the unreduced omega_gamma
        return e2pi(u * gamma[1] / n) * kronecker_phi(u, v, tau)

    worst = 0.0
    for u_left, shift_left, u_right, shift_right in ((n * hbar, z / n, z, hbar), (z, hbar, n * hbar, z / n)):
        terms = [
            kappa(alpha, gamma, n) ** 2 * phi_twisted(alpha, u_left, alpha.omega(tau) + shift_left, params)
            for alpha in LatticeIndex.all(n)
        ]
        lhs = sum(terms) / n
        rhs = twisted(u_right, omega_gamma + shift_right)
        worst = max(worst, _residual(lhs, rhs, max(abs(t) for t in terms) / n))
    logger.debug(f"prop31_components at gamma={gamma}: {worst:.3e}")
    return worst


# ---------------------------------------------------------------------------
# R-matrix properties
# ---------------------------------------------------------------------------

def _r_guards(s: Sample) -> List[complex]:
    return [s["z"], s.n * s["hbar"], *_shifted(s, s["hbar"])]


@registry.check(
    "sym_args",
    anchor="R^hbar_12(z) = R^{z/N}_12(N hbar) P_12",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=lambda s: [*_r_guards(s), *_shifted(s, s["z"] / s.n)],
)
def sym_args(s: Sample) -> float:
    n = s.n
    lhs = _r(1, 2, s, s["hbar"], s["z"])
    swapped = _r(1, 2, s, s["z"] / n, n * s["hbar"])
    return _residual(lhs, swapped @ permutation_p(1, 2, TensorLayout(2, n)))


@registry.check(
    "unitarity",
    anchor="R^hbar_12(u) R^hbar_21(-u) = N^2 (wp(N hbar) - wp(u)) 1",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r_guards,
)
def unitarity(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    r12 = _r(1, 2, s, hbar, z)
    r21 = _r(2, 1, s, hbar, -z)
    eye = np.eye(n * n)
    via_wp = unitarity_scalar(n, hbar, z, tau) * eye
    via_phi = n * n * kronecker_phi(n * hbar, z, tau) * kronecker_phi(n * hbar, -z, tau) * eye
    scale = _products((r12, r21))
    return max(_scaled(r12 @ r21, via_wp, scale), _scaled(r12 @ r21, via_phi, scale))


@registry.check(
    "znzn_symmetry",
    anchor="(g x g) R_12 (g^-1 x g^-1) = R_12 for g in {Q, Lambda}",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r_guards,
)
def znzn_symmetry(s: Sample) -> float:
    n = s.n
    r = _r(1, 2, s, s["hbar"], s["z"])
    worst = 0.0
    for g in (gen_q(n), gen_lambda(n)):
        conjugated = _embed_pair(g, g, n) @ r @ _embed_pair(_inv(g), _inv(g), n)
        worst = max(worst, _residual(conjugated, r))
    return worst


@registry.check(
    "parity_R",
    anchor="R^hbar_12(z) = -R^{-hbar}_21(-z)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=lambda s: [*_r_guards(s), *_shifted(s, -s["hbar"])],
)
def parity_r_matrix(s: Sample) -> float:
    lhs = _r(1, 2, s, s["hbar"], s["z"])
    rhs = -_r(2, 1, s, -s["hbar"], -s["z"])
    return _residual(lhs, rhs)


@registry.check(
    "parity_rm",
    anchor="r_12(z) = -r_21(-z), m_12(z) = m_21(-z), F^hbar_12(z) = F^{-hbar}_21(-z)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=lambda s: [*_r_guards(s), *_shifted(s, -s["hbar"])],
)
def parity_rm(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    return max(
        _residual(classical_r(1, 2, z, n, tau), -classical_r(2, 1, -z, n, tau)),
        _residual(classical_m(1, 2, z, n, tau), classical_m(2, 1, -z, n, tau)),
        _residual(f_matrix(1, 2, RParams(n, tau, hbar, z)), f_matrix(2, 1, RParams(n, tau, -hbar, -z))),
    )


@registry.check(
    "r2_minus_2m",
    anchor="r_12(z)^2 - 2 m_12(z) = N^2 wp(z) 1",
    arity=("z",),
    tolerance=ALGEBRAIC,
    guards=lambda s: [s["z"]],
)
def r2_minus_2m(s: Sample) -> float:
    n, tau, z = s.n, s.tau, s["z"]
    r = classical_r(1, 2, z, n, tau)
    m = classical_m(1, 2, z, n, tau)
    target = n * n * wp(z, tau) * np.eye(n * n)
    return _scaled(r @ r - 2 * m, target, max(product_scale(r, r), 2 * max_abs(m)))


@registry.check(
    "local_h_expansion",
    anchor="R^hbar_12(z) = 1/hbar + r_12(z) + hbar m_12(z) + O(hbar^2)",
    arity=("z",),
    tolerance=ORDER,
    guards=lambda s: [s["z"]],
)
def local_h_expansion(s: Sample) -> float:
    n, tau, z = s.n, s.tau, s["z"]
    eye = np.eye(n * n)
    r = classical_r(1, 2, z, n, tau)
    m = classical_m(1, 2, z, n, tau)

    def remainder(t):
        hbar = _ray(t)
        return max_abs(_r(1, 2, s, hbar, z) - eye / hbar - r - hbar * m)

    return _order_residual(remainder(1e-3), remainder(5e-4), 2)


@registry.check(
    "local_z_expansion",
    anchor="R^hbar_12(z) = N P_12 / z + R^{hbar,(0)}_12 + O(z)",
    arity=("hbar",),
    tolerance=ORDER,
    guards=lambda s: [s.n * s["hbar"], *_shifted(s, s["hbar"])],
)
def local_z_expansion(s: Sample) -> float:
    n, tau, hbar = s.n, s.tau, s["hbar"]
    p = permutation_p(1, 2, TensorLayout(2, n))
    constant = r_zero(1, 2, hbar, n, tau)

    def remainder(t):
        z = _ray(t)
        return max_abs(_r(1, 2, s, hbar, z) - n * p / z - constant)

    return _order_residual(remainder(1e-2), remainder(5e-3), 1)


@registry.check(
    "residue_h",
    anchor="res_{hbar=0} R^hbar_12(z) = 1",
    arity=("z",),
    tolerance=FD,
    guards=lambda s: [s["z"]],
)
def residue_h(s: Sample) -> float:
    limit = _ray_limit(lambda t: t * _r(1, 2, s, t, s["z"]))
    return max_abs(limit - np.eye(s.n * s.n))


@registry.check(
    "residue_z",
    anchor="res_{z=0} R^hbar_12(z) = res_{z=0} r_12(z) = N P_12",
    arity=("hbar",),
    tolerance=FD,
    guards=lambda s: [s.n * s["hbar"], *_shifted(s, s["hbar"])],
)
def residue_z(s: Sample) -> float:
    n, tau = s.n, s.tau
    target = n * permutation_p(1, 2, TensorLayout(2, n))
    quantum = _ray_limit(lambda t: t * _r(1, 2, s, s["hbar"], t))
    classical = _ray_limit(lambda t: t * classical_r(1, 2, t, n, tau))
    return max(max_abs(quantum - target), max_abs(classical - target))


# quasi-periodicity

@registry.check(
    "qp_z_1",
    anchor="R^hbar_12(z+1) = (Q^-1 x 1) R^hbar_12(z) (Q x 1), same for r_12",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r_guards,
)
def qp_z_1(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    eye, q = np.eye(n), gen_q(n)
    left, right = _embed_pair(_inv(q), eye, n), _embed_pair(q, eye, n)
    return max(
        _residual(_r(1, 2, s, hbar, z + 1), left @ _r(1, 2, s, hbar, z) @ right),
        _residual(classical_r(1, 2, z + 1, n, tau), left @ classical_r(1, 2, z, n, tau) @ right),
    )


@registry.check(
    "qp_z_tau",
    anchor="R^hbar_12(z+tau) = e(-hbar) (Lambda^-1 x 1) R^hbar_12(z) (Lambda x 1); r_12(z+tau) = ... - 2 pi i",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r_guards,
)
def qp_z_tau(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    eye, lam = np.eye(n), gen_lambda(n)
    left, right = _embed_pair(_inv(lam), eye, n), _embed_pair(lam, eye, n)
    r_shifted = left @ classical_r(1, 2, z, n, tau) @ right - TWO_PI_I * np.eye(n * n)
    return max(
        _residual(_r(1, 2, s, hbar, z + tau), e2pi(-hbar) * left @ _r(1, 2, s, hbar, z) @ right),
        _residual(classical_r(1, 2, z + tau, n, tau), r_shifted),
    )


@registry.check(
    "qp_h_1",
    anchor="R^{hbar+1}_12(z) = R^hbar_12(z); R^{hbar+1/N}_12(z) = (Q^-1 x 1) R^hbar_12(z) (1 x Q)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r_guards,
)
def qp_h_1(s: Sample) -> float:
    n, z, hbar = s.n, s["z"], s["hbar"]
    eye, q = np.eye(n), gen_q(n)
    r = _r(1, 2, s, hbar, z)
    return max(
        _residual(_r(1, 2, s, hbar + 1, z), r),
        _residual(_r(1, 2, s, hbar + 1 / n, z), _embed_pair(_inv(q), eye, n) @ r @ _embed_pair(eye, q, n)),
    )


@registry.check(
    "qp_h_tau",
    anchor="R^{hbar+tau}_12(z) = e(-z) R^hbar_12(z); R^{hbar+tau/N}_12(z) = e(-z/N) (Lambda^-1 x 1) R (1 x Lambda)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r_guards,
)
def qp_h_tau(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    eye, lam = np.eye(n), gen_lambda(n)
    r = _r(1, 2, s, hbar, z)
    conjugated = _embed_pair(_inv(lam), eye, n) @ r @ _embed_pair(eye, lam, n)
    return max(
        _residual(_r(1, 2, s, hbar + tau, z), e2pi(-z) * r),
        _residual(_r(1, 2, s, hbar + tau / n, z), e2pi(-z / n) * conjugated),
    )


GAMMA_RANGE = {"g1": (-2, 4), "g2": (-2, 4)}


@registry.check(
    "qp_gamma_z",
    anchor="R^hbar_12(z + N omega_gamma) = e(-N hbar d_tau omega_gamma) (T_gamma^-1 x 1) R^hbar_12(z) (T_gamma x 1)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    integers=GAMMA_RANGE,
    guards=_r_guards,
)
def qp_gamma_z(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    g1, g2 = s["g1"], s["g2"]
    t = t_basis((g1, g2), n)
    eye = np.eye(n)
    shift = g1 + g2 * tau
    rhs = e2pi(-hbar * g2) * _embed_pair(_inv(t), eye, n) @ _r(1, 2, s, hbar, z) @ _embed_pair(t, eye, n)
    return _residual(_r(1, 2, s, hbar, z + shift), rhs)


@registry.check(
    "qp_gamma_h",
    anchor="R^{hbar+omega_gamma}_12(z) = e(-z d_tau omega_gamma) (T_gamma^-1 x 1) R^hbar_12(z) (1 x T_gamma)",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    integers=GAMMA_RANGE,
    guards=_r_guards,
)
def qp_gamma_h(s: Sample) -> float:
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    g1, g2 = s["g1"], s["g2"]
    t = t_basis((g1, g2), n)
    eye = np.eye(n)
    omega = (g1 + g2 * tau) / n
    rhs = e2pi(-z * g2 / n) * _embed_pair(_inv(t), eye, n) @ _r(1, 2, s, hbar, z) @ _embed_pair(eye, t, n)
    return _residual(_r(1, 2, s, hbar + omega, z), rhs)


@registry.check(
    "heat",
    anchor="2 pi i d_tau R^hbar_12(z) = d_z d_hbar R^hbar_12(z)",
    arity=("z", "hbar"),
    tolerance=FD,
    max_samples=30,
    guards=_r_guards,
)
def heat(s: Sample) -> float:
    params = RParams(s.n, s.tau, s["hbar"], s["z"])
    lhs = TWO_PI_I * quantum_r_dtau_fd(1, 2, params)
    return _residual(lhs, quantum_r_dz_dhbar(1, 2, params))


# derivative identities

def _derivative_guards(s: Sample) -> List[complex]:
    n, z, hbar = s.n, s["z"], s["hbar"]
    return [*_r_guards(s), z + n * hbar, z - n * hbar]


def check_derivative_identities(s: Sample) -> Dict[str, float]:
    """
    Residuals of the hbar- and z-derivative identities.

    d_hbar R = (r(z+N hbar) R + R r(z-N hbar)) / 2 + N/2 (E1(z+N hbar) - E1(z-N hbar) - 2 E1(N hbar)) R
    d_z R = (r(z+N hbar) R - R r(z-N hbar)) / 2N + 1/2 (E1(z+N hbar) + E1(z-N hbar) - 2 E1(z)) R
    """
    n, tau, z, hbar = s.n, s.tau, s["z"], s["hbar"]
    params = RParams(n, tau, hbar, z)
    r = quantum_r(1, 2, params)
    r_plus = classical_r(1, 2, z + n * hbar, n, tau)
    r_minus = classical_r(1, 2, z - n * hbar, n, tau)
    e_plus, e_minus = e1(z + n * hbar, tau), e1(z - n * hbar, tau)
    left, right = r_plus @ r, r @ r_minus
    products = _products((r_plus, r), (r, r_minus))

    d_hbar = (left + right) / 2 + n / 2 * (e_plus - e_minus - 2 * e1(n * hbar, tau)) * r
    d_z = (left - right) / (2 * n) + (e_plus + e_minus - 2 * e1(z, tau)) / 2 * r
    scalar_hbar = n / 2 * max(abs(e_plus), abs(e_minus), abs(e1(n * hbar, tau))) * max_abs(r)
    scalar_z = max(abs(e_plus), abs(e_minus), abs(e1(z, tau))) * max_abs(r)
    return {
        "hbar": _scaled(quantum_r_dhbar(1, 2, params), d_hbar, max(products, scalar_hbar)),
        "z": _scaled(f_matrix(1, 2, params), d_z, max(products / n, scalar_z)),
    }


@registry.check(
    "deriv_h",
    anchor="d_hbar R^hbar_12(z) = (r_12(z+N hbar) R + R r_12(z-N hbar))/2 + N/2 (E1(z+N hbar) - E1(z-N hbar) - 2 E1(N hbar)) R",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    max_samples=30,
    guards=_derivative_guards,
)
def deriv_h(s: Sample) -> float:
    return check_derivative_identities(s)["hbar"]


@registry.check(
    "deriv_z",
    anchor="d_z R^hbar_12(z) = (r_12(z+N hbar) R - R r_12(z-N hbar))/2N + (E1(z+N hbar) + E1(z-N hbar) - 2 E1(z))/2 R",
    arity=("z", "hbar"),
    tolerance=ALGEBRAIC,
    max_samples=30,
    guards=_derivative_guards,
)
def deriv_z(s: Sample) -> float:
    return check_derivative_identities(s)["z"]


# ---------------------------------------------------------------------------
# Fay identities in Mat^{x3}
# ---------------------------------------------------------------------------

def _three_point_guards(s: Sample) -> List[complex]:
    h, h2 = s["hbar"], s["hbar2"]
    z1, z2, z3 = s["z1"], s["z2"], s["z3"]
    return [z1 - z2, z2 - z3, z1 - z3, *_shifted(s, h, h2, h - h2, h2 - h)]


def check_aybe(s: Sample) -> float:
    """R^hbar_ab R^hbar'_bc = R^hbar'_ac R^{hbar-hbar'}_ab + R^{hbar'-hbar}_bc R^hbar_ac with R_ab = R_ab(z_a - z_b)."""
    layout = TensorLayout(3, s.n)
    h, h2 = s["hbar"], s["hbar2"]
    z12, z23, z13 = s["z1"] - s["z2"], s["z2"] - s["z3"], s["z1"] - s["z3"]
    r12, r23 = _r(1, 2, s, h, z12, layout), _r(2, 3, s, h2, z23, layout)
    r13_h2, r12_diff = _r(1, 3, s, h2, z13, layout), _r(1, 2, s, h - h2, z12, layout)
    r23_diff, r13 = _r(2, 3, s, h2 - h, z23, layout), _r(1, 3, s, h, z13, layout)
    rhs = r13_h2 @ r12_diff + r23_diff @ r13
    scale = _products((r12, r23), (r13_h2, r12_diff), (r23_diff, r13))
    return _scaled(r12 @ r23, rhs, scale)


@registry.check(
    "aybe",
    anchor="R^hbar_ab R^hbar'_bc = R^hbar'_ac R^{hbar-hbar'}_ab + R^{hbar'-hbar}_bc R^hbar_ac",
    arity=("z1", "z2", "z3", "hbar", "hbar2"),
    tolerance=ALGEBRAIC,
    max_samples=30,
    guards=_three_point_guards,
)
def aybe(s: Sample) -> float:
    return check_aybe(s)


def degenerate_fay_r11(s: Sample) -> float:
    """R^hbar_ab R^hbar_bc = R^hbar_ac r_ab + r_bc R^hbar_ac - d_hbar R^hbar_ac."""
    n, tau, h = s.n, s.tau, s["hbar"]
    layout = TensorLayout(3, n)
    z12, z23, z13 = s["z1"] - s["z2"], s["z2"] - s["z3"], s["z1"] - s["z3"]
    r12, r23, r13 = _r(1, 2, s, h, z12, layout), _r(2, 3, s, h, z23, layout), _r(1, 3, s, h, z13, layout)
    c12 = classical_r(1, 2, z12, n, tau, layout)
    c23 = classical_r(2, 3, z23, n, tau, layout)
    d13 = quantum_r_dhbar(1, 3, RParams(n, tau, h, z13), layout)
    rhs = r13 @ c12 + c23 @ r13 - d13
    scale = max(_products((r12, r23), (r13, c12), (c23, r13)), max_abs(d13))
    return _scaled(r12 @ r23, rhs, scale)


def degenerate_fay_r120(s: Sample) -> float:
    """R_ab^hbar(z) R_bc^hbar'(-z) = R^{hbar',(0)}_ac R^{hbar-hbar'}_ab(z) + R^{hbar'-hbar}_bc(-z) R^{hbar,(0)}_ac + N F^{hbar'-hbar}_bc(-z) P_ac."""
    n, tau, z, h, h2 = s.n, s.tau, s["z"], s["hbar"], s["hbar2"]
    layout = TensorLayout(3, n)
    r12, r23 = _r(1, 2, s, h, z, layout), _r(2, 3, s, h2, -z, layout)
    zero_h2, zero_h = r_zero(1, 3, h2, n, tau, layout), r_zero(1, 3, h, n, tau, layout)
    r12_diff, r23_diff = _r(1, 2, s, h - h2, z, layout), _r(2, 3, s, h2 - h, -z, layout)
    f23 = f_matrix(2, 3, RParams(n, tau, h2 - h, -z), layout)
    p13 = permutation_p(1, 3, layout)
    rhs = zero_h2 @ r12_diff + r23_diff @ zero_h + n * f23 @ p13
    scale = max(_products((r12, r23), (zero_h2, r12_diff), (r23_diff, zero_h)), n * max_abs(f23))
    return _scaled(r12 @ r23, rhs, scale)


# ---------------------------------------------------------------------------
# Fay identities in Mat^{x2}
# ---------------------------------------------------------------------------

def _fay_mat2_guards(s: Sample) -> List[complex]:
    n, z, w, h, h2 = s.n, s["z"], s["w"], s["hbar"], s["hbar2"]
    y = (z - w) / n + h2 - h
    return [z, w, z - w, y, n * h, n * h2, z + n * h2, w + n * h, z + n * h, w + n * h2,
            *_shifted(s, h, h2, h - h2, (z - w) / n)]


def check_fay_mat2(s: Sample) -> float:
    """
    R^hbar_12(z) R^hbar'_21(-w) against the four-term right-hand side.

    With y = (z-w)/N + hbar' - hbar the right-hand side is
    N phi(N hbar', y) R^{hbar-hbar'}(z+N hbar') - N phi(N hbar, y) R^{hbar-hbar'}(w+N hbar)
    + N phi(-w, y) R^{(z-w)/N}(w+N hbar) - N phi(-z, y) R^{(z-w)/N}(z+N hbar').
    """
    n, tau, z, w, h, h2 = s.n, s.tau, s["z"], s["w"], s["hbar"], s["hbar2"]
    y = (z - w) / n + h2 - h
    left, right = _r(1, 2, s, h, z), _r(2, 1, s, h2, -w)
    terms = [
        n * kronecker_phi(n * h2, y, tau) * _r(1, 2, s, h - h2, z + n * h2),
        -n * kronecker_phi(n * h, y, tau) * _r(1, 2, s, h - h2, w + n * h),
        n * kronecker_phi(-w, y, tau) * _r(1, 2, s, (z - w) / n, w + n * h),
        -n * kronecker_phi(-z, y, tau) * _r(1, 2, s, (z - w) / n, z + n * h2),
    ]
    scale = max([product_scale(left, right)] + [max_abs(t) for t in terms])
    return _scaled(left @ right, sum(terms), scale)


@registry.check(
    "fay_mat2",
    anchor="R^hbar_12(z) R^hbar'_21(-w) = sum of four phi-weighted R-matrices at shifted arguments",
    arity=("z", "w", "hbar", "hbar2"),
    tolerance=ALGEBRAIC,
    guards=_fay_mat2_guards,
)
def fay_mat2(s: Sample) -> float:
    return check_fay_mat2(s)


def _r12_guards(s: Sample) -> List[complex]:
    n, z, w, h = s.n, s["z"], s["w"], s["hbar"]
    x = (z - w) / n
    return [z, w, z - w, x, n * h, z + n * h, w + n * h, n * h + x, *_shifted(s, h, x)]


def degenerate_fay_r12(s: Sample) -> float:
    """
    R^hbar_12(z) R^hbar_21(-w) = N phi(x, N hbar) (r(z+N hbar) - r(w+N hbar))
    + N phi(-x, z) R^x(z+N hbar) - N phi(-x, w) R^x(w+N hbar)
    + N^2 phi(x, N hbar) (E1(N hbar) - E1(N hbar + x)) 1, with x = (z-w)/N.
    """
    n, tau, z, w, h = s.n, s.tau, s["z"], s["w"], s["hbar"]
    x = (z - w) / n
    left, right = _r(1, 2, s, h, z), _r(2, 1, s, h, -w)
    phi_x = kronecker_phi(x, n * h, tau)
    terms = [
        n * phi_x * classical_r(1, 2, z + n * h, n, tau),
        -n * phi_x * classical_r(1, 2, w + n * h, n, tau),
        n * kronecker_phi(-x, z, tau) * _r(1, 2, s, x, z + n * h),
        -n * kronecker_phi(-x, w, tau) * _r(1, 2, s, x, w + n * h),
        n * n * phi_x * (e1(n * h, tau) - e1(n * h + x, tau)) * np.eye(n * n),
    ]
    scale = max([product_scale(left, right)] + [max_abs(t) for t in terms])
    return _scaled(left @ right, sum(terms), scale)


def _r13_guards(s: Sample) -> List[complex]:
    n, z, h, h2 = s.n, s["z"], s["hbar"], s["hbar2"]
    return [z, h2 - h, n * h, n * h2, z + n * h, z + n * h2, z + h - h2, *_shifted(s, h, h2, h - h2)]


def degenerate_fay_r13(s: Sample) -> float:
    """
    R^hbar_12(z) R^hbar'_21(-z) = N phi(d, -z) (r(z+N hbar) - r(z+N hbar'))
    - N phi(d, N hbar) R^{-d}(z+N hbar) + N phi(d, N hbar') R^{-d}(z+N hbar')
    + N^2 phi(d, -z) (E1(z) - E1(z-d)) 1, with d = hbar' - hbar.
    """
    n, tau, z, h, h2 = s.n, s.tau, s["z"], s["hbar"], s["hbar2"]
    d = h2 - h
    left, right = _r(1, 2, s, h, z), _r(2, 1, s, h2, -z)
    phi_z = kronecker_phi(d, -z, tau)
    terms = [
        n * phi_z * classical_r(1, 2, z + n * h, n, tau),
        -n * phi_z * classical_r(1, 2, z + n * h2, n, tau),
        -n * kronecker_phi(d, n * h, tau) * _r(1, 2, s, -d, z + n * h),
        n * kronecker_phi(d, n * h2, tau) * _r(1, 2, s, -d, z + n * h2),
        n * n * phi_z * (e1(z, tau) - e1(z - d, tau)) * np.eye(n * n),
    ]
    scale = max([product_scale(left, right)] + [max_abs(t) for t in terms])
    return _scaled(left @ right, sum(terms), scale)


def check_degenerate_fay(s: Sample) -> Dict[str, float]:
    """All four degenerate Fay residuals; the sample must carry z, w, z1..z3, hbar and hbar2."""
    return {
        "r11": degenerate_fay_r11(s),
        "r120": degenerate_fay_r120(s),
        "r12": degenerate_fay_r12(s),
        "r13": degenerate_fay_r13(s),
    }


@registry.check(
    "fay_mat3_deg_r11",
    anchor="R^hbar_ab R^hbar_bc = R^hbar_ac r_ab + r_bc R^hbar_ac - d_hbar R^hbar_ac",
    arity=("z1", "z2", "z3", "hbar"),
    tolerance=ALGEBRAIC,
    max_samples=30,
    guards=lambda s: [s["z1"] - s["z2"], s["z2"] - s["z3"], s["z1"] - s["z3"], *_shifted(s, s["hbar"])],
)
def fay_mat3_deg_r11(s: Sample) -> float:
    return degenerate_fay_r11(s)


@registry.check(
    "fay_mat3_deg_r120",
    anchor="R_ab^hbar(z) R_bc^hbar'(-z) = R^{hbar',(0)}_ac R^{hbar-hbar'}_ab(z) + R^{hbar'-hbar}_bc(-z) R^{hbar,(0)}_ac + N F^{hbar'-hbar}_bc(-z) P_ac",
    arity=("z", "hbar", "hbar2"),
    tolerance=ALGEBRAIC,
    max_samples=30,
    guards=lambda s: [s["z"], *_shifted(s, s["hbar"], s["hbar2"], s["hbar"] - s["hbar2"], s["hbar2"] - s["hbar"])],
)
def fay_mat3_deg_r120(s: Sample) -> float:
    return degenerate_fay_r120(s)


@registry.check(
    "fay_mat2_deg_r12",
    anchor="R^hbar_12(z) R^hbar_21(-w) degenerate Fay identity (hbar' = hbar)",
    arity=("z", "w", "hbar"),
    tolerance=ALGEBRAIC,
    guards=_r12_guards,
)
def fay_mat2_deg_r12(s: Sample) -> float:
    return degenerate_fay_r12(s)


@registry.check(
    "fay_mat2_deg_r13",
    anchor="R^hbar_12(z) R^hbar'_21(-z) degenerate Fay identity (w = z)",
    arity=("z", "hbar", "hbar2"),
    tolerance=ALGEBRAIC,
    guards=_r13_guards,
)
def fay_mat2_deg_r13(s: Sample) -> float:
    return degenerate_fay_r13(s)


# ---------------------------------------------------------------------------
# Calogero-Moser Lax matrix
# ---------------------------------------------------------------------------

CM_SIZES = {(2, 2), (2, 3), (3, 2)}


def _cm_params(s: Sample, hbar: complex) -> CMLaxParams:
    k = s["n_tilde"]
    positions = [s["z1"], s["z2"], s["z3"]][:k]
    momenta = [s["p1"], s["p2"], s["p3"]][:k]
    return CMLaxParams(k, momenta, positions, s["nu"], hbar, s.n, s.tau)


def _cm_guards(s: Sample) -> List[complex]:
    z1, z2, z3 = s["z1"], s["z2"], s["z3"]
    return [z1 - z2, z2 - z3, z1 - z3, *_shifted(s, s["hbar"])]


CM_CHECK = dict(
    arity=("z1", "z2", "z3", "p1", "p2", "p3", "nu", "hbar"),
    tolerance=ALGEBRAIC,
    n_values=(2, 3),
    integers={"n_tilde": (2, 3)},
    guards=_cm_guards,
    accept=lambda s: (s["n_tilde"], s.n) in CM_SIZES,
)


@registry.check("cm_qp_1", anchor="L(hbar + 1/N) = Q^-1 L(hbar) Q", **CM_CHECK)
def cm_qp_1(s: Sample) -> float:
    params = _cm_params(s, s["hbar"])
    q = cm_block_q(params)
    lhs = cm_lax(params.with_hbar(params.hbar + 1 / s.n))
    return _residual(lhs, _inv(q) @ cm_lax(params) @ q)


@registry.check(
    "cm_qp_tau",
    anchor="L(hbar + tau/N) = exp(-2 pi i Z/N) Lambda^-1 L(hbar) Lambda exp(2 pi i Z/N)",
    **CM_CHECK,
)
def cm_qp_tau(s: Sample) -> float:
    params = _cm_params(s, s["hbar"])
    lam = cm_block_lambda(params)
    z = cm_block_z(params)
    left, right = expm(-TWO_PI_I * z / s.n), expm(TWO_PI_I * z / s.n)
    lhs = cm_lax(params.with_hbar(params.hbar + s.tau / s.n))
    return _residual(lhs, left @ _inv(lam) @ cm_lax(params) @ lam @ right)


# ---------------------------------------------------------------------------
# Painleve VI
# ---------------------------------------------------------------------------

def _pvi_constants() -> PVIConstants:
    return PVIConstants(config.painleve.nu)


def _pvi_guards(s: Sample) -> List[complex]:
    n, tau, h = s.n, s.tau, s["hbar"]
    half = HalfPeriods.for_tau(tau)
    guards = [n * h, *_shifted(s, h)]
    for name in ("u", "u2"):
        if name in s.values:
            guards.extend(shifted_points(s[name], tau, n))
    for wa in half.omega:
        for wb in half.omega:
            guards.append(n * h + wa - wb)
    return guards


@lru_cache(maxsize=256)
def _zero_curvature(u: complex, hbar: complex, tau: complex, n: int, u_alt: complex) -> Dict[str, float]:
    return check_zero_curvature_identities(u, hbar, tau, n, u_alt)


def _zero_curvature_key(key: str):
    def residual(s: Sample) -> float:
        return _zero_curvature(s["u"], s["hbar"], s.tau, s.n, s["u2"])[key]
    return residual


PVI_CHECK = dict(arity=("u", "u2", "hbar"), tolerance=ALGEBRAIC, max_samples=30, guards=_pvi_guards)

registry.check("pvi_offdiag_cancel", anchor="[L^a, M^b] + [L^b, M^a] = 0 for a != b",
               **PVI_CHECK)(_zero_curvature_key("offdiag_cancel"))
registry.check("pvi_unitarity_shifted", anchor="R^a_12(u) R^a_21(-u) = N^2 (wp(N hbar) - wp(u + N Omega_a))",
               **PVI_CHECK)(_zero_curvature_key("unitarity"))
registry.check("pvi_eom", anchor="F^a_12 R^a_21 - R^a_12 F^a_21 = -N^2 wp'(u + N Omega_a)",
               **PVI_CHECK)(_zero_curvature_key("equation_of_motion"))
registry.check("pvi_constant_pair",
               anchor="R^a_12 R^b_21 + R^b_12 R^a_21 = N^2 phi_{a+b}(N hbar, Omega_a + Omega_b) (2 E1(N hbar) - ...)",
               **PVI_CHECK)(_zero_curvature_key("constant_pair"))
registry.check("pvi_constant_pair_du", anchor="d/du (R^a_12 R^b_21 + R^b_12 R^a_21) = 0",
               **PVI_CHECK)(_zero_curvature_key("constant_pair_du"))
registry.check("pvi_u_independence", anchor="R^a_12 R^b_21 + R^b_12 R^a_21 takes equal values at two u",
               **PVI_CHECK)(_zero_curvature_key("u_independence"))


@registry.check(
    "pvi_scalar_pair",
    anchor="x_a y_b + x_b y_a = e(hbar (dOmega_a + dOmega_b)) phi(hbar, Omega_a + Omega_b) (2 E1(hbar) - ...)",
    arity=("u", "hbar"),
    tolerance=ALGEBRAIC,
    n_values=(1,),
    guards=_pvi_guards,
)
def pvi_scalar_pair(s: Sample) -> float:
    worst = 0.0
    for a in HALF_PERIOD_INDICES:
        for b in HALF_PERIOD_INDICES:
            if b > a:
                worst = max(worst, *scalar_pair_identities(s["u"], s["hbar"], s.tau, a, b))
    return worst


@registry.check(
    "pvi_even_collapse",
    anchor="for even N, wp'(u + N Omega_a) = wp'(u) and F R - R F is a-independent",
    arity=("u", "hbar"),
    tolerance=ALGEBRAIC,
    n_values=(2,),
    guards=_pvi_guards,
)
def pvi_even_collapse(s: Sample) -> float:
    n, tau, u, h = s.n, s.tau, s["u"], s["hbar"]
    base = wp_prime(u, tau)
    constants = _pvi_constants()
    state = PVIState(u, 0.0, tau)
    worst = _residual(pvi_rhs(state, constants, n), -constants.effective_nu_squared() * base)
    motion = {}
    for a in HALF_PERIOD_INDICES:
        f12, r21 = shifted_f(a, h, u, n, tau, "12"), shifted_r(a, h, u, n, tau, "21")
        r12, f21 = shifted_r(a, h, u, n, tau, "12"), shifted_f(a, h, u, n, tau, "21")
        motion[a] = (f12 @ r21 - r12 @ f21, _products((f12, r21), (r12, f21)))
        worst = max(worst, _residual(wp_prime(u + n * HalfPeriods.for_tau(tau).omega[a], tau), base))
    for a in HALF_PERIOD_INDICES[1:]:
        worst = max(worst, _scaled(motion[a][0], motion[0][0], max(motion[a][1], motion[0][1])))
    return worst


@registry.check(
    "pvi_heat",
    anchor="d_hbar F^a blocks = 2 pi i times the explicit tau-derivative of the R^a blocks",
    arity=("u", "hbar"),
    tolerance=FD,
    max_samples=10,
    guards=_pvi_guards,
)
def pvi_heat(s: Sample) -> float:
    n, tau, u, h = s.n, s.tau, s["u"], s["hbar"]
    h0 = config.rmatrix.fd_step
    worst = 0.0
    for a in HALF_PERIOD_INDICES:
        for direction in ("12", "21"):
            def block(t):
                return shifted_r(a, h, u, n, t, direction)

            def estimate(step):
                real = (block(tau + step) - block(tau - step)) / (2 * step)
                imag = (block(tau + 1j * step) - block(tau - 1j * step)) / (2j * step)
                return (real + imag) / 2

            dtau = richardson([estimate(h0), estimate(h0 / 2)])
            worst = max(worst, _residual(TWO_PI_I * dtau, shifted_f_dhbar(a, h, u, n, tau, direction)))
    return worst


@registry.check(
    "pvi_monodromy",
    anchor="dL/dtau - (1/2 pi i) dM/dhbar = [L, M] on shell",
    arity=("u", "v", "hbar"),
    tolerance=MONODROMY_TOLERANCE,
    n_values=(1, 3),
    max_samples=20,
    guards=_pvi_guards,
)
def pvi_monodromy(s: Sample) -> float:
    state = PVIState(s["u"], s["v"], s.tau)
    return monodromy_residual(state, _pvi_constants(), s["hbar"], s.n, "analytic")


OFF_SHELL_DELTA = 1e-3


@registry.check(
    "pvi_offshell",
    anchor="an acceleration offset delta leaves a diagonal residual of size delta/2",
    arity=("u", "v", "hbar"),
    tolerance=FD,
    n_values=(1, 3),
    max_samples=20,
    guards=_pvi_guards,
)
def pvi_offshell(s: Sample) -> float:
    state = PVIState(s["u"], s["v"], s.tau)
    constants = _pvi_constants()
    acceleration = pvi_rhs(state, constants, s.n) + OFF_SHELL_DELTA
    residual = monodromy_residual(state, constants, s["hbar"], s.n, "analytic", acceleration)
    return abs(residual / (OFF_SHELL_DELTA / 2) - 1.0)


@registry.check(
    "pvi_defect_fit",
    anchor="diagonal defect is proportional to u'' + sum nu_a^2 wp'(u + Omega_a) (odd N) or u'' + nu^2 wp'(u) (even N)",
    arity=("u", "v", "hbar"),
    tolerance=FD,
    n_values=(2, 3),
    max_samples=6,
    guards=_pvi_guards,
)
def pvi_defect_fit(s: Sample) -> float:
    state = PVIState(s["u"], s["v"], s.tau)
    fits = fit_diagonal_defect(state, _pvi_constants(), s["hbar"], s.n)
    expected = "single_constant" if s.n % 2 == 0 else "four_constant"
    return fits[expected]["fit_residual"]
