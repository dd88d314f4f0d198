"""
Baxter-Belavin R-matrix builders.

This module assembles the Z_N x Z_N elliptic quantum R-matrix

    R^hbar_ab(z) = sum_alpha e(z a2/N) phi(z, omega_alpha + hbar) T_alpha x T_-alpha

acting on slots a, b of Mat(N, C)^{tensor n}, together with its z- and
hbar-derivatives, the classical r-matrix and second-order term m, the
constant term of the z-expansion, the half-period shifted blocks used by the
Painleve VI Lax pair and the R-matrix valued Calogero-Moser Lax matrix.

Every builder computes one coefficient per alpha (lexicographic order) and
contracts the coefficient vector with a cached stack of basis pairs, so
summation order is fixed and residuals are reproducible.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import block_diag

from ..core.config import config
from ..core.exceptions import DimensionError
from .elliptic import (
    TWO_PI_I,
    check_tau,
    e1,
    e2pi,
    kronecker_phi,
    kronecker_phi_jet,
    richardson,
    wp,
)
from .matrixalg import (
    LatticeIndex,
    TensorLayout,
    basis_pair_stack,
    gen_lambda,
    gen_q,
    identity,
    tensor_embed,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RParams:
    """One R-matrix evaluation point (N, tau, hbar, z)."""

    n: int
    tau: complex
    hbar: complex
    z: complex

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"N must be positive, got {self.n}")
        object.__setattr__(self, "tau", check_tau(self.tau))
        object.__setattr__(self, "hbar", complex(self.hbar))
        object.__setattr__(self, "z", complex(self.z))

    def with_(self, **changes) -> "RParams":
        values = {"n": self.n, "tau": self.tau, "hbar": self.hbar, "z": self.z}
        values.update(changes)
        return RParams(**values)


@dataclass(frozen=True)
class CMLaxParams:
    """
    Calogero-Moser data for the R-matrix valued Lax matrix.

    Attributes:
        n_tilde (int): Number of particles, equal to the number of tensor slots
        momenta (tuple): p_a, one per particle
        positions (tuple): z_a, pairwise distinct modulo the lattice
        nu (complex): Coupling constant
        hbar (complex): Spectral parameter
        n (int): Matrix size N of each tensor factor
        tau (complex): Modulus
    """

    n_tilde: int
    momenta: tuple
    positions: tuple
    nu: complex
    hbar: complex
    n: int
    tau: complex

    def __post_init__(self):
        if self.n_tilde < 2:
            raise ValueError(f"Calogero-Moser Lax matrix needs at least 2 particles, got {self.n_tilde}")
        if len(self.momenta) != self.n_tilde or len(self.positions) != self.n_tilde:
            raise DimensionError(
                "momenta and positions must have one entry per particle",
                expected=self.n_tilde,
                actual=(len(self.momenta), len(self.positions)),
            )
        object.__setattr__(self, "momenta", tuple(complex(p) for p in self.momenta))
        object.__setattr__(self, "positions", tuple(complex(z) for z in self.positions))
        object.__setattr__(self, "tau", check_tau(self.tau))

    @property
    def layout(self) -> TensorLayout:
        return TensorLayout(self.n_tilde, self.n)

    def with_hbar(self, hbar: complex) -> "CMLaxParams":
        return CMLaxParams(self.n_tilde, self.momenta, self.positions, self.nu, hbar, self.n, self.tau)


@dataclass(frozen=True)
class HalfPeriods:
    """The half-periods {0, 1/2, (1+tau)/2, tau/2} and their tau-derivatives."""

    omega: tuple
    dtau: tuple = (0.0, 0.0, 0.5, 0.5)

    @classmethod
    def for_tau(cls, tau: complex) -> "HalfPeriods":
        return cls(omega=(0j, 0.5 + 0j, (1 + tau) / 2, tau / 2))


def default_layout(n: int) -> TensorLayout:
    return TensorLayout(2, n)


def _check_dimension(layout: TensorLayout, blocks: int = 1):
    size = blocks * layout.dim
    if size > config.rmatrix.max_dimension:
        raise DimensionError(
            f"Matrix size {size} exceeds the configured cap {config.rmatrix.max_dimension}",
            expected=config.rmatrix.max_dimension,
            actual=size,
        )


def _contract(coefficients: Sequence[complex], a: int, b: int, layout: TensorLayout) -> np.ndarray:
    _check_dimension(layout)
    stack = basis_pair_stack(a, b, layout)
    return np.tensordot(np.asarray(coefficients, dtype=complex), stack, axes=1)


def phi_twisted(alpha: LatticeIndex, u: complex, v: complex, params: RParams) -> complex:
    """exp(2 pi i u a2/N) phi(u, v); the caller supplies v = omega_alpha + hbar."""
    return e2pi(u * alpha.dtau) * kronecker_phi(u, v, params.tau)


def _summand(alpha: LatticeIndex, params: RParams, kind: str) -> complex:
    z, tau = params.z, params.tau
    twist = e2pi(z * alpha.dtau)
    k = TWO_PI_I * alpha.dtau
    phi, phi_z, phi_u, phi_zu = kronecker_phi_jet(z, alpha.omega(tau) + params.hbar, tau)
    if kind == "r":
        return twist * phi
    if kind == "dz":
        return twist * (phi_z + k * phi)
    if kind == "dhbar":
        return twist * phi_u
    if kind == "dzdhbar":
        return twist * (phi_zu + k * phi_u)
    raise ValueError(f"Unknown summand kind: {kind}")


def _assemble(a: int, b: int, params: RParams, layout: Optional[TensorLayout], kind: str) -> np.ndarray:
    layout = layout or default_layout(params.n)
    if layout.factor_dim != params.n:
        raise DimensionError(
            f"Layout factor dimension {layout.factor_dim} does not match N = {params.n}",
            expected=params.n,
            actual=layout.factor_dim,
        )
    coefficients = [_summand(alpha, params, kind) for alpha in LatticeIndex.all(params.n)]
    return _contract(coefficients, a, b, layout)


def quantum_r(a: int, b: int, params: RParams, layout: Optional[TensorLayout] = None) -> np.ndarray:
    """
    Quantum R-matrix R^hbar_ab(z) on slots a, b.

    Args:
        a (int): Slot of T_alpha (1-based)
        b (int): Slot of T_-alpha (1-based)
        params (RParams): Evaluation point
        layout (TensorLayout, optional): Ambient tensor power; defaults to two slots

    Returns:
        np.ndarray: Dense N^n x N^n matrix. For N = 1 this is phi(z, hbar).

    Raises:
        PoleError: If z or some omega_alpha + hbar lies on the lattice
    """
    return _assemble(a, b, params, layout, "r")


def f_matrix(a: int, b: int, params: RParams, layout: Optional[TensorLayout] = None) -> np.ndarray:
    """F^hbar_ab(z) = d/dz R^hbar_ab(z), differentiated summand by summand."""
    return _assemble(a, b, params, layout, "dz")


def quantum_r_dhbar(a: int, b: int, params: RParams, layout: Optional[TensorLayout] = None) -> np.ndarray:
    """d/dhbar R^hbar_ab(z)."""
    return _assemble(a, b, params, layout, "dhbar")


def quantum_r_dz_dhbar(a: int, b: int, params: RParams, layout: Optional[TensorLayout] = None) -> np.ndarray:
    """Mixed derivative d^2/dz dhbar R, equal to d/dhbar F."""
    return _assemble(a, b, params, layout, "dzdhbar")


def quantum_r_dtau_fd(a: int, b: int, params: RParams, layout: Optional[TensorLayout] = None,
                      step: Optional[float] = None) -> np.ndarray:
    """
    d/dtau R by central differences.

    Real and imaginary tau displacements are averaged and the result is
    Richardson-extrapolated from steps h and h/2.
    """
    h0 = step or config.rmatrix.fd_step

    def estimate(h: float) -> np.ndarray:
        real = (quantum_r(a, b, params.with_(tau=params.tau + h), layout)
                - quantum_r(a, b, params.with_(tau=params.tau - h), layout)) / (2 * h)
        imag = (quantum_r(a, b, params.with_(tau=params.tau + 1j * h), layout)
                - quantum_r(a, b, params.with_(tau=params.tau - 1j * h), layout)) / (2j * h)
        return (real + imag) / 2

    return richardson([estimate(h0), estimate(h0 / 2)], ratio=2.0, power=2)


def classical_r(a: int, b: int, z: complex, n: int, tau: complex,
                layout: Optional[TensorLayout] = None) -> np.ndarray:
    """Classical r-matrix E1(z) 1 + sum_{alpha != 0} e(z a2/N) phi(z, omega_alpha) T_alpha x T_-alpha."""
    layout = layout or default_layout(n)
    coefficients = []
    for alpha in LatticeIndex.all(n):
        if alpha.is_zero:
            coefficients.append(e1(z, tau))
        else:
            coefficients.append(e2pi(z * alpha.dtau) * kronecker_phi(z, alpha.omega(tau), tau))
    return _contract(coefficients, a, b, layout)


def classical_m(a: int, b: int, z: complex, n: int, tau: complex,
                layout: Optional[TensorLayout] = None) -> np.ndarray:
    """Linear term of the hbar-expansion: (E1^2 - wp)/2 1 + twisted d phi/du at u = omega_alpha."""
    layout = layout or default_layout(n)
    coefficients = []
    for alpha in LatticeIndex.all(n):
        if alpha.is_zero:
            value = e1(z, tau)
            coefficients.append((value * value - wp(z, tau)) / 2)
        else:
            phi_u = kronecker_phi_jet(z, alpha.omega(tau), tau)[2]
            coefficients.append(e2pi(z * alpha.dtau) * phi_u)
    return _contract(coefficients, a, b, layout)


def r_zero(a: int, b: int, hbar: complex, n: int, tau: complex,
           layout: Optional[TensorLayout] = None) -> np.ndarray:
    """Constant term R^{hbar,(0)} of the expansion R = N P / z + R^{(0)} + O(z)."""
    layout = layout or default_layout(n)
    coefficients = [e1(hbar + alpha.omega(tau), tau) + TWO_PI_I * alpha.dtau for alpha in LatticeIndex.all(n)]
    return _contract(coefficients, a, b, layout)


def _shift(a_index: int, u: complex, n: int, tau: complex, direction: str):
    if a_index not in (0, 1, 2, 3):
        raise ValueError(f"Half-period index must be 0..3, got {a_index}")
    half = HalfPeriods.for_tau(tau)
    argument = u + n * half.omega[a_index]
    phase_rate = n * half.dtau[a_index]
    if direction == "12":
        return (1, 2), argument, phase_rate
    if direction == "21":
        return (2, 1), -argument, -phase_rate
    raise ValueError(f"direction must be '12' or '21', got {direction}")


def shifted_r(a_index: int, hbar: complex, u: complex, n: int, tau: complex, direction: str = "12") -> np.ndarray:
    """
    Half-period shifted R-matrix block.

    The 12 direction is e(N hbar dOmega_a/dtau) R^hbar_12(u + N Omega_a); the 21
    direction is e(-N hbar dOmega_a/dtau) R^hbar_21(-u - N Omega_a).
    """
    slots, argument, rate = _shift(a_index, u, n, tau, direction)
    params = RParams(n, tau, hbar, argument)
    return e2pi(hbar * rate) * quantum_r(*slots, params)


def shifted_f(a_index: int, hbar: complex, u: complex, n: int, tau: complex, direction: str = "12") -> np.ndarray:
    """Half-period shifted F block, with the same phases as ``shifted_r``."""
    slots, argument, rate = _shift(a_index, u, n, tau, direction)
    params = RParams(n, tau, hbar, argument)
    return e2pi(hbar * rate) * f_matrix(*slots, params)


def shifted_f_dhbar(a_index: int, hbar: complex, u: complex, n: int, tau: complex,
                    direction: str = "12") -> np.ndarray:
    """d/dhbar of ``shifted_f``, including the derivative of the phase."""
    slots, argument, rate = _shift(a_index, u, n, tau, direction)
    params = RParams(n, tau, hbar, argument)
    f = f_matrix(*slots, params)
    df = quantum_r_dz_dhbar(*slots, params)
    return e2pi(hbar * rate) * (TWO_PI_I * rate * f + df)


def cm_lax(params: CMLaxParams) -> np.ndarray:
    """
    R-matrix valued Calogero-Moser Lax matrix.

    Block (a, b) is p_a 1 on the diagonal and nu R^hbar_ab(z_a - z_b) off it.
    Blocks are laid out slot-major: particle index outer, tensor space inner.

    Raises:
        DimensionError: If n_tilde * N^n_tilde exceeds the configured cap
    """
    layout = params.layout
    _check_dimension(layout, blocks=params.n_tilde)
    eye = identity(layout)
    rows: List[List[np.ndarray]] = []
    for a in range(1, params.n_tilde + 1):
        row = []
        for b in range(1, params.n_tilde + 1):
            if a == b:
                row.append(params.momenta[a - 1] * eye)
            else:
                z_ab = params.positions[a - 1] - params.positions[b - 1]
                r_params = RParams(params.n, params.tau, params.hbar, z_ab)
                row.append(params.nu * quantum_r(a, b, r_params, layout))
        rows.append(row)
    logger.debug(f"Assembled Calogero-Moser Lax matrix for n_tilde={params.n_tilde}, N={params.n}")
    return np.block(rows)


def _block_diagonal(params: CMLaxParams, build: Callable[[int], np.ndarray]) -> np.ndarray:
    _check_dimension(params.layout, blocks=params.n_tilde)
    return block_diag(*[build(a) for a in range(1, params.n_tilde + 1)])


def cm_block_q(params: CMLaxParams) -> np.ndarray:
    """Block-diagonal sum of Q embedded in slot a."""
    q = gen_q(params.n)
    return _block_diagonal(params, lambda a: tensor_embed(q, a, params.layout))


def cm_block_lambda(params: CMLaxParams) -> np.ndarray:
    """Block-diagonal sum of Lambda embedded in slot a."""
    lam = gen_lambda(params.n)
    return _block_diagonal(params, lambda a: tensor_embed(lam, a, params.layout))


def cm_block_z(params: CMLaxParams) -> np.ndarray:
    """Block-diagonal sum of z_a times the identity."""
    eye = identity(params.layout)
    return _block_diagonal(params, lambda a: params.positions[a - 1] * eye)


def unitarity_scalar(n: int, hbar: complex, u: complex, tau: complex) -> complex:
    """N^2 (wp(N hbar) - wp(u)), the scalar in R_12(u) R_21(-u)."""
    return n * n * (wp(n * hbar, tau) - wp(u, tau))
