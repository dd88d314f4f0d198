"""
Painleve VI in elliptic form and its R-matrix valued Lax pair.

This module provides:
- The right-hand side d^2u/dtau^2 = -sum_a nu_a^2 wp'(u + N Omega_a)
- The 2N^2 x 2N^2 Lax pair L(hbar), M(hbar) built from half-period shifted
  R-matrix and F blocks
- The residual of the monodromy-preserving equation
  dL/dtau - (1/2 pi i) dM/dhbar - [L, M] in analytic and finite-difference modes
- The block identities behind the zero-curvature equation
- An adaptive Cash-Karp integrator along straight paths in the upper half-plane
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..core.config import config
from ..core.exceptions import DomainError, IntegrationHalt
from .elliptic import (
    TWO_PI_I,
    check_tau,
    e1,
    e2pi,
    kronecker_phi,
    kronecker_phi_du,
    lattice_distance,
    richardson,
    wp,
    wp_prime,
)
from .matrixalg import max_abs
from .rmatrix import HalfPeriods, shifted_f, shifted_f_dhbar, shifted_r

logger = logging.getLogger(__name__)

# Fixed branch of sqrt(-2); it multiplies every nu_a uniformly.
SQRT_MINUS_TWO = 1j * math.sqrt(2.0)

HALF_PERIOD_INDICES = (0, 1, 2, 3)


@dataclass(frozen=True)
class PVIConstants:
    """The four constants nu_0..nu_3. For even N only their squared sum matters."""

    nu: Tuple[complex, complex, complex, complex]

    def __post_init__(self):
        if len(self.nu) != 4:
            raise ValueError(f"Painleve VI needs four constants, got {len(self.nu)}")
        object.__setattr__(self, "nu", tuple(complex(x) for x in self.nu))

    def effective_nu_squared(self) -> complex:
        """nu^2 = sum_a nu_a^2, the single constant of the even-N equation."""
        return sum(x * x for x in self.nu)

    def couplings(self, n: int) -> Tuple[complex, ...]:
        """Block coefficients nu_a / (N sqrt(-2))."""
        return tuple(x / (n * SQRT_MINUS_TWO) for x in self.nu)


@dataclass(frozen=True)
class PVIState:
    """A point (u, v = du/dtau, tau) of the Painleve VI flow."""

    u: complex
    v: complex
    tau: complex

    def __post_init__(self):
        object.__setattr__(self, "u", complex(self.u))
        object.__setattr__(self, "v", complex(self.v))
        object.__setattr__(self, "tau", check_tau(self.tau))


@dataclass(frozen=True)
class LaxPairEval:
    """L(hbar) and M(hbar) at one state."""

    L: np.ndarray
    M: np.ndarray
    hbar: complex


@dataclass(frozen=True)
class TrajectoryPoint:
    """One accepted integrator step."""

    tau: complex
    u: complex
    v: complex
    local_error: float
    min_pole_distance: float
    residuals: Tuple[float, ...] = field(default_factory=tuple)


def shifted_points(u: complex, tau: complex, n: int = 1) -> List[complex]:
    """u + N Omega_a for a = 0..3."""
    half = HalfPeriods.for_tau(tau)
    return [u + n * omega for omega in half.omega]


def min_pole_distance(state: PVIState, constants: PVIConstants, n: int = 1) -> float:
    """Smallest lattice distance of the shifted arguments that carry a nonzero constant."""
    distances = [
        lattice_distance(point, state.tau)
        for point, nu in zip(shifted_points(state.u, state.tau, n), constants.nu)
        if nu != 0
    ]
    return min(distances) if distances else math.inf


def pvi_rhs(state: PVIState, constants: PVIConstants, n: int = 1) -> complex:
    """
    Painleve VI acceleration -sum_a nu_a^2 wp'(u + N Omega_a).

    For N = 1 (and any odd N) this is the four-constant elliptic form; for
    even N every shift is a lattice vector and the sum collapses to
    -nu^2 wp'(u).

    Raises:
        PoleError: If a shifted argument with nonzero constant lies on the lattice
    """
    total = 0j
    for point, nu in zip(shifted_points(state.u, state.tau, n), constants.nu):
        if nu != 0:
            total -= nu * nu * wp_prime(point, state.tau)
    return total


def _blocks(state: PVIState, constants: PVIConstants, hbar: complex, n: int, builder, direction: str):
    dim = n * n
    total = np.zeros((dim, dim), dtype=complex)
    for a, c in zip(HALF_PERIOD_INDICES, constants.couplings(n)):
        if c != 0:
            total += c * builder(a, hbar, state.u, n, state.tau, direction)
    return total


def lax_blocks(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1) -> Dict[str, np.ndarray]:
    """Off-diagonal blocks A, B of L and C, D of M, plus their hbar-derivatives dC, dD."""
    return {
        "A": _blocks(state, constants, hbar, n, shifted_r, "12"),
        "B": _blocks(state, constants, hbar, n, shifted_r, "21"),
        "C": _blocks(state, constants, hbar, n, shifted_f, "12"),
        "D": _blocks(state, constants, hbar, n, shifted_f, "21"),
        "dC": _blocks(state, constants, hbar, n, shifted_f_dhbar, "12"),
        "dD": _blocks(state, constants, hbar, n, shifted_f_dhbar, "21"),
    }


def _two_by_two(upper_left, upper_right, lower_left, lower_right) -> np.ndarray:
    return np.block([[upper_left, upper_right], [lower_left, lower_right]])


def build_lax(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1) -> LaxPairEval:
    """
    Assemble the Lax pair L(hbar), M(hbar) of size 2 N^2.

    Args:
        state (PVIState): Point (u, v, tau)
        constants (PVIConstants): nu_0..nu_3
        hbar (complex): Spectral parameter
        n (int): Matrix size N

    Returns:
        LaxPairEval: L with diagonal blocks +-(v/2) 1, M with zero diagonal blocks
    """
    blocks = lax_blocks(state, constants, hbar, n)
    eye = np.eye(n * n, dtype=complex)
    zero = np.zeros_like(eye)
    L = _two_by_two(state.v / 2 * eye, blocks["A"], blocks["B"], -state.v / 2 * eye)
    M = _two_by_two(zero, blocks["C"], blocks["D"], zero)
    return LaxPairEval(L=L, M=M, hbar=complex(hbar))


def lax_derivatives(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1) -> Dict[str, np.ndarray]:
    """
    Analytic partial derivatives of the Lax pair.

    Returns:
        dict: ``L``, ``M``, ``dL_du``, ``dL_dv``, ``dL_dtau`` (explicit tau-dependence,
        obtained from dM/dhbar through the heat equation) and ``dM_dhbar``.
    """
    blocks = lax_blocks(state, constants, hbar, n)
    eye = np.eye(n * n, dtype=complex)
    zero = np.zeros_like(eye)
    dM_dhbar = _two_by_two(zero, blocks["dC"], blocks["dD"], zero)
    return {
        "L": _two_by_two(state.v / 2 * eye, blocks["A"], blocks["B"], -state.v / 2 * eye),
        "M": _two_by_two(zero, blocks["C"], blocks["D"], zero),
        "dL_du": _two_by_two(zero, blocks["C"], -blocks["D"], zero),
        "dL_dv": _two_by_two(eye / 2, zero, zero, -eye / 2),
        "dL_dtau": dM_dhbar / TWO_PI_I,
        "dM_dhbar": dM_dhbar,
    }


def _central(fn, h: float) -> np.ndarray:
    def estimate(step):
        return (fn(step) - fn(-step)) / (2 * step)
    return richardson([estimate(h), estimate(h / 2)], ratio=2.0, power=2)


def _fd_derivatives(state: PVIState, constants: PVIConstants, hbar: complex, n: int, step: float):
    def L_at(u=state.u, tau=state.tau):
        return build_lax(PVIState(u, state.v, tau), constants, hbar, n).L

    pair = build_lax(state, constants, hbar, n)
    eye = np.eye(n * n, dtype=complex)
    zero = np.zeros_like(eye)
    dL_dtau_real = _central(lambda h: L_at(tau=state.tau + h), step)
    dL_dtau_imag = _central(lambda h: L_at(tau=state.tau + 1j * h), step) / 1j
    return {
        "L": pair.L,
        "M": pair.M,
        "dL_du": _central(lambda h: L_at(u=state.u + h), step),
        "dL_dv": _two_by_two(eye / 2, zero, zero, -eye / 2),
        "dL_dtau": (dL_dtau_real + dL_dtau_imag) / 2,
        "dM_dhbar": _central(lambda h: build_lax(state, constants, hbar + h, n).M, step),
    }


def residual_matrix(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1,
                    mode: str = "analytic", acceleration: Optional[complex] = None,
                    step: Optional[float] = None) -> np.ndarray:
    """
    dL/dtau - (1/2 pi i) dM/dhbar - [L, M] with dL/dtau = v dL/du + u'' dL/dv + explicit dL/dtau.

    Args:
        acceleration (complex, optional): u''; defaults to ``pvi_rhs`` (on-shell)
        mode (str): "analytic" or "fd"
    """
    if mode == "analytic":
        parts = lax_derivatives(state, constants, hbar, n)
    elif mode == "fd":
        parts = _fd_derivatives(state, constants, hbar, n, step or config.painleve.fd_step)
    else:
        raise ValueError(f"mode must be 'analytic' or 'fd', got {mode}")
    if acceleration is None:
        acceleration = pvi_rhs(state, constants, n)
    L, M = parts["L"], parts["M"]
    dL = state.v * parts["dL_du"] + acceleration * parts["dL_dv"] + parts["dL_dtau"]
    return dL - parts["dM_dhbar"] / TWO_PI_I - (L @ M - M @ L)


def monodromy_residual(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1,
                       mode: str = "analytic", acceleration: Optional[complex] = None) -> float:
    """Max-abs entry of the monodromy-preserving equation residual."""
    return max_abs(residual_matrix(state, constants, hbar, n, mode, acceleration))


def compare_residual_modes(state: PVIState, constants: PVIConstants, hbar: complex,
                           n: int = 1) -> Dict[str, object]:
    """
    Evaluate the residual in both modes and flag ill-conditioned finite differences.

    The fd route is flagged when both residuals exceed ``fd_noise_floor`` and
    differ by more than a factor of 10.
    """
    analytic = monodromy_residual(state, constants, hbar, n, "analytic")
    fd = monodromy_residual(state, constants, hbar, n, "fd")
    floor = config.painleve.fd_noise_floor
    ratio = max(analytic, fd) / max(min(analytic, fd), 1e-300)
    flagged = min(analytic, fd) > floor and ratio > 10.0
    if flagged:
        logger.warning(f"Residual modes disagree at hbar={hbar}: analytic {analytic:.3e}, fd {fd:.3e}")
    return {"analytic": analytic, "fd": fd, "ill_conditioned": flagged}


def diagonal_defect(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1,
                    acceleration: Optional[complex] = None) -> complex:
    """Scalar value of the upper-left residual block (it is a multiple of the identity)."""
    residual = residual_matrix(state, constants, hbar, n, "analytic", acceleration)
    dim = n * n
    return complex(np.trace(residual[:dim, :dim]) / dim)


def defect_candidates(state: PVIState, constants: PVIConstants, acceleration: complex) -> Dict[str, complex]:
    """
    The two candidate equations of motion evaluated at an off-shell acceleration.

    ``four_constant`` is u'' + sum_a nu_a^2 wp'(u + Omega_a); ``single_constant``
    is u'' + nu^2 wp'(u).
    """
    four = acceleration - pvi_rhs(state, constants, 1)
    single = acceleration + constants.effective_nu_squared() * wp_prime(state.u, state.tau)
    return {"four_constant": four, "single_constant": single}


def fit_diagonal_defect(state: PVIState, constants: PVIConstants, hbar: complex, n: int = 1,
                        perturbations: Optional[Sequence[float]] = None) -> Dict[str, Dict[str, float]]:
    """
    Regress the diagonal defect against both candidate equations of motion.

    For each candidate X the defect d is fitted as d = c X by least squares
    over off-shell accelerations u'' = rhs + delta_k. The relative fit residual
    is ||d - c X|| / ||d||.

    Returns:
        dict: candidate -> {"coefficient_re", "coefficient_im", "fit_residual"}
    """
    deltas = list(perturbations or np.linspace(1e-3, 1e-2, 10))
    on_shell = pvi_rhs(state, constants, n)
    defects, columns = [], {"four_constant": [], "single_constant": []}
    for delta in deltas:
        acceleration = on_shell + delta
        defects.append(diagonal_defect(state, constants, hbar, n, acceleration))
        for name, value in defect_candidates(state, constants, acceleration).items():
            columns[name].append(value)

    d = np.array(defects)
    fits = {}
    for name, values in columns.items():
        x = np.array(values).reshape(-1, 1)
        coefficient, _, _, _ = np.linalg.lstsq(x, d, rcond=None)
        misfit = np.linalg.norm(d - x[:, 0] * coefficient[0]) / max(np.linalg.norm(d), 1e-300)
        fits[name] = {
            "coefficient_re": float(coefficient[0].real),
            "coefficient_im": float(coefficient[0].imag),
            "fit_residual": float(misfit),
        }
    logger.debug(f"Diagonal defect fit for N={n}: {fits}")
    return fits


def component_pair(a_index: int, u: complex, hbar: complex, tau: complex, n: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """The single-constant pieces L^a, M^a (off-diagonal 2 x 2 block matrices)."""
    zero = np.zeros((n * n, n * n), dtype=complex)
    L = _two_by_two(zero, shifted_r(a_index, hbar, u, n, tau, "12"), shifted_r(a_index, hbar, u, n, tau, "21"), zero)
    M = _two_by_two(zero, shifted_f(a_index, hbar, u, n, tau, "12"), shifted_f(a_index, hbar, u, n, tau, "21"), zero)
    return L, M


def constant_pair_value(a_index: int, b_index: int, hbar: complex, tau: complex, n: int = 1) -> complex:
    """
    The u-independent scalar of the cross product of two shifted blocks.

    N^2 e(N hbar (dOmega_a + dOmega_b)) phi(N hbar, Omega_a + Omega_b)
    (2 E1(N hbar) - E1(N hbar + Omega_a - Omega_b) - E1(N hbar + Omega_b - Omega_a))
    """
    half = HalfPeriods.for_tau(tau)
    x = n * hbar
    wa, wb = half.omega[a_index], half.omega[b_index]
    twist = e2pi(x * (half.dtau[a_index] + half.dtau[b_index]))
    return n * n * twist * kronecker_phi(x, wa + wb, tau) * (2 * e1(x, tau) - e1(x + wa - wb, tau) - e1(x + wb - wa, tau))


def _normalized(diff: np.ndarray, *terms: np.ndarray) -> float:
    scale = max([1.0] + [max_abs(t) for t in terms])
    return max_abs(diff) / scale


def check_zero_curvature_identities(u: complex, hbar: complex, tau: complex, n: int = 1,
                                    u_alt: Optional[complex] = None) -> Dict[str, float]:
    """
    Residuals of the block identities behind the monodromy-preserving equation.

    Returns:
        dict with keys
        ``offdiag_cancel`` ([L^a, M^b] + [L^b, M^a] = 0, all six pairs),
        ``unitarity`` (shifted blocks multiply to N^2 (wp(N hbar) - wp(u + N Omega_a))),
        ``equation_of_motion`` (F R - R F = -N^2 wp'(u + N Omega_a)),
        ``constant_pair`` (cross products equal the u-independent scalar),
        ``constant_pair_du`` (u-derivative of the previous identity),
        ``u_independence`` (cross products at u and ``u_alt`` agree).
    """
    dim = n * n
    eye = np.eye(dim, dtype=complex)
    r12 = {a: shifted_r(a, hbar, u, n, tau, "12") for a in HALF_PERIOD_INDICES}
    r21 = {a: shifted_r(a, hbar, u, n, tau, "21") for a in HALF_PERIOD_INDICES}
    f12 = {a: shifted_f(a, hbar, u, n, tau, "12") for a in HALF_PERIOD_INDICES}
    f21 = {a: shifted_f(a, hbar, u, n, tau, "21") for a in HALF_PERIOD_INDICES}
    pieces = {a: component_pair(a, u, hbar, tau, n) for a in HALF_PERIOD_INDICES}
    points = shifted_points(u, tau, n)

    results = {name: 0.0 for name in (
        "offdiag_cancel", "unitarity", "equation_of_motion", "constant_pair", "constant_pair_du", "u_independence")}

    for a in HALF_PERIOD_INDICES:
        product = r12[a] @ r21[a]
        target = n * n * (wp(n * hbar, tau) - wp(points[a], tau)) * eye
        results["unitarity"] = max(results["unitarity"], _normalized(product - target, product, target))

        motion = f12[a] @ r21[a] - r12[a] @ f21[a]
        target = -n * n * wp_prime(points[a], tau) * eye
        results["equation_of_motion"] = max(
            results["equation_of_motion"], _normalized(motion - target, f12[a] @ r21[a], r12[a] @ f21[a], target))

    alt = None
    if u_alt is not None:
        alt_r12 = {a: shifted_r(a, hbar, u_alt, n, tau, "12") for a in HALF_PERIOD_INDICES}
        alt_r21 = {a: shifted_r(a, hbar, u_alt, n, tau, "21") for a in HALF_PERIOD_INDICES}
        alt = (alt_r12, alt_r21)

    for a in HALF_PERIOD_INDICES:
        for b in HALF_PERIOD_INDICES:
            if b <= a:
                continue
            La, Ma = pieces[a]
            Lb, Mb = pieces[b]
            cancel = (La @ Mb - Mb @ La) + (Lb @ Ma - Ma @ Lb)
            results["offdiag_cancel"] = max(
                results["offdiag_cancel"], _normalized(cancel, La @ Mb, Lb @ Ma))

            cross = r12[a] @ r21[b] + r12[b] @ r21[a]
            target = constant_pair_value(a, b, hbar, tau, n) * eye
            results["constant_pair"] = max(
                results["constant_pair"], _normalized(cross - target, r12[a] @ r21[b], r12[b] @ r21[a], target))

            derivative = f12[a] @ r21[b] - r12[a] @ f21[b] + f12[b] @ r21[a] - r12[b] @ f21[a]
            results["constant_pair_du"] = max(
                results["constant_pair_du"],
                _normalized(derivative, f12[a] @ r21[b], r12[a] @ f21[b], f12[b] @ r21[a], r12[b] @ f21[a]))

            if alt is not None:
                alt_cross = alt[0][a] @ alt[1][b] + alt[0][b] @ alt[1][a]
                results["u_independence"] = max(
                    results["u_independence"], _normalized(cross - alt_cross, cross, alt_cross))

    return results


def scalar_pair_identities(u: complex, hbar: complex, tau: complex, a: int, b: int) -> Tuple[float, float]:
    """
    Scalar (N = 1) cross-product identity and its u-derivative.

    With x_a = e(hbar dOmega_a) phi(hbar, u + Omega_a) and
    y_a = e(-hbar dOmega_a) phi(hbar, -u - Omega_a), the sum x_a y_b + x_b y_a
    equals ``constant_pair_value(a, b, hbar, tau, 1)`` and its u-derivative vanishes.
    """
    half = HalfPeriods.for_tau(tau)

    def x(k):
        return e2pi(hbar * half.dtau[k]) * kronecker_phi(hbar, u + half.omega[k], tau)

    def dx(k):
        return e2pi(hbar * half.dtau[k]) * kronecker_phi_du(hbar, u + half.omega[k], tau)

    def y(k):
        return e2pi(-hbar * half.dtau[k]) * kronecker_phi(hbar, -u - half.omega[k], tau)

    def dy(k):
        return -e2pi(-hbar * half.dtau[k]) * kronecker_phi_du(hbar, -u - half.omega[k], tau)

    terms = [x(a) * y(b), x(b) * y(a)]
    target = constant_pair_value(a, b, hbar, tau, 1)
    pair = abs(sum(terms) - target) / max(1.0, *[abs(t) for t in terms])
    derivative_terms = [dx(a) * y(b), x(a) * dy(b), dx(b) * y(a), x(b) * dy(a)]
    pair_du = abs(sum(derivative_terms)) / max(1.0, *[abs(t) for t in derivative_terms])
    return pair, pair_du


# Cash-Karp 5(4) tableau
_STAGES = (0.0, 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8)
_BT = {
    0: [1 / 5],
    1: [3 / 40, 9 / 40],
    2: [3 / 10, -9 / 10, 6 / 5],
    3: [-11 / 54, 5 / 2, -70 / 27, 35 / 27],
    4: [1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096],
    5: [37 / 378, 0, 250 / 621, 125 / 594, 0, 512 / 1771],
}
_TR = (-277 / 64512, 0, 6925 / 370944, -6925 / 202752, -277 / 14336, 277 / 7084)


class PainleveIntegrator:
    """
    Adaptive Cash-Karp integrator for the Painleve VI flow.

    This class provides methods for:
    - Integrating (u, v) along the straight path tau(s) = tau0 + s (tau_end - tau0)
    - Monitoring the distance of the shifted arguments to the lattice
    - Optionally recording the monodromy residual at each accepted step

    Attributes:
        settings (IntegratorConfig): Tolerances and step limits
        pole_guard (float): Halting distance to the lattice
        min_im_tau (float): Lowest admissible Im tau along the path
        residual_mode (str): "analytic" or "fd" for the recorded monodromy residuals
    """

    def __init__(self, settings=None, pole_guard: Optional[float] = None, min_im_tau: Optional[float] = None,
                 residual_mode: str = "analytic"):
        """
        Initialize the integrator.

        Args:
            settings (IntegratorConfig, optional): Defaults to the global integrator config
            pole_guard (float, optional): Defaults to the Painleve pole guard
            min_im_tau (float, optional): Defaults to the Painleve minimum Im tau
            residual_mode (str): Residual evaluation mode, "analytic" or "fd"
        """
        if residual_mode not in ("analytic", "fd"):
            raise ValueError(f"residual_mode must be 'analytic' or 'fd', got {residual_mode}")
        self.settings = settings or config.integrator
        self.pole_guard = config.painleve.pole_guard if pole_guard is None else pole_guard
        self.min_im_tau = config.painleve.min_im_tau if min_im_tau is None else min_im_tau
        self.residual_mode = residual_mode

    def _derivative(self, y: np.ndarray, s: float, tau0: complex, span: complex,
                    constants: PVIConstants, n: int) -> np.ndarray:
        state = PVIState(y[0], y[1], tau0 + s * span)
        return span * np.array([y[1], pvi_rhs(state, constants, n)], dtype=complex)

    def _step(self, y, s, h, tau0, span, constants, n):
        slopes = [self._derivative(y, s, tau0, span, constants, n)]
        for stage in range(5):
            increment = sum(w * k for w, k in zip(_BT[stage], slopes))
            slopes.append(self._derivative(y + h * increment, s + _STAGES[stage + 1] * h, tau0, span, constants, n))
        y_new = y + h * sum(w * k for w, k in zip(_BT[5], slopes))
        error = h * sum(w * k for w, k in zip(_TR, slopes))
        scale = self.settings.atol + self.settings.rtol * np.maximum(np.abs(y), np.abs(y_new))
        return y_new, float(np.max(np.abs(error) / scale)), float(np.max(np.abs(error)))

    def _point(self, y, tau, constants, n, local_error, hbar_samples) -> TrajectoryPoint:
        state = PVIState(y[0], y[1], tau)
        distance = min_pole_distance(state, constants, n)
        if distance < self.pole_guard:
            # the halting point is still reported; its residuals are undefined
            residuals = tuple(math.nan for _ in hbar_samples)
        else:
            residuals = tuple(monodromy_residual(state, constants, hbar, n, self.residual_mode)
                              for hbar in hbar_samples)
        return TrajectoryPoint(
            tau=tau,
            u=complex(y[0]),
            v=complex(y[1]),
            local_error=local_error,
            min_pole_distance=distance,
            residuals=residuals,
        )

    def integrate(self, initial: PVIState, constants: PVIConstants, tau_end: complex, n: int = 1,
                  hbar_samples: Sequence[complex] = ()) -> List[TrajectoryPoint]:
        """
        Integrate from ``initial`` to ``tau_end`` along a straight line.

        Args:
            initial (PVIState): Starting point (u0, v0, tau0)
            constants (PVIConstants): nu_0..nu_3
            tau_end (complex): End of the path
            n (int): Matrix size N entering the shifts u + N Omega_a
            hbar_samples (Sequence[complex]): Spectral parameters at which the
                monodromy residual is recorded for every accepted point

        Returns:
            List[TrajectoryPoint]: The initial point followed by every accepted step

        Raises:
            DomainError: If the path leaves Im tau >= min_im_tau
            IntegrationHalt: On pole approach, step underflow or step budget exhaustion
        """
        tau0, tau_end = initial.tau, complex(tau_end)
        if min(tau0.imag, tau_end.imag) < self.min_im_tau:
            raise DomainError(
                f"Path from {tau0} to {tau_end} leaves Im tau >= {self.min_im_tau}",
                parameter="tau_end",
                value=tau_end,
            )
        span = tau_end - tau0
        settings = self.settings
        y = np.array([initial.u, initial.v], dtype=complex)
        s, h = 0.0, min(settings.initial_step, settings.max_step)

        trajectory = [self._point(y, tau0, constants, n, 0.0, hbar_samples)]
        if trajectory[0].min_pole_distance < self.pole_guard:
            raise IntegrationHalt("Initial state is within the pole guard", reason="pole_approach", trajectory=trajectory)

        logger.info(f"Integrating Painleve VI (N={n}) from tau={tau0} to tau={tau_end}")
        progress = tqdm(total=1.0, disable=not settings.progress, desc="Painleve VI", unit="path")
        steps = 0
        try:
            while s < 1.0:
                if steps >= settings.max_steps:
                    raise IntegrationHalt(
                        f"Step budget of {settings.max_steps} exhausted at s={s:.6f}",
                        reason="max_steps",
                        trajectory=trajectory,
                    )
                h = min(h, 1.0 - s)
                y_new, err, local_error = self._step(y, s, h, tau0, span, constants, n)
                steps += 1
                if err <= 1.0:
                    s += h
                    y = y_new
                    point = self._point(y, tau0 + s * span, constants, n, local_error, hbar_samples)
                    trajectory.append(point)
                    progress.update(h)
                    if point.min_pole_distance < self.pole_guard:
                        raise IntegrationHalt(
                            f"Approached a pole at tau={point.tau} (distance {point.min_pole_distance:.3e})",
                            reason="pole_approach",
                            trajectory=trajectory,
                        )
                factor = settings.max_growth if err == 0 else settings.safety * err ** -0.2
                if not np.isfinite(factor):
                    factor = settings.min_shrink
                h = min(settings.max_step, h * min(settings.max_growth, max(settings.min_shrink, factor)))
                if h < settings.min_step and s < 1.0:
                    raise IntegrationHalt(
                        f"Step size underflow at s={s:.6f} (h={h:.3e})",
                        reason="step_underflow",
                        trajectory=trajectory,
                    )
        except IntegrationHalt as halt:
            logger.error(f"Integration halted: {halt.message}")
            raise
        finally:
            progress.close()

        logger.info(f"Integration finished after {steps} steps, {len(trajectory)} points")
        return trajectory


# Global integrator instance
integrator = PainleveIntegrator()


def integrate(initial: PVIState, constants: PVIConstants, tau_end: complex, n: int = 1,
              hbar_samples: Sequence[complex] = ()) -> List[TrajectoryPoint]:
    """Integrate with the global integrator instance."""
    return integrator.integrate(initial, constants, tau_end, n, hbar_samples)
