"""
Dense complex matrix algebra over Mat(N, C)^{tensor n}.

This module builds the clock and shift generators of the finite Heisenberg
group, the sin-algebra basis T_alpha with its structure constants, tensor
slot embeddings and the permutation operator. Matrices are dense
``complex128`` numpy arrays; cached results are returned read-only.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import List, Tuple, Union

import numpy as np

from ..core.exceptions import DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatticeIndex:
    """
    Element alpha = (a1, a2) of Z_N x Z_N.

    Representatives are reduced into {0, ..., N-1} on construction. The
    half-lattice point omega_alpha = (a1 + a2 tau) / N and its tau-derivative
    a2 / N are derived from the stored representatives.
    """

    a1: int
    a2: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"N must be positive, got {self.n}")
        object.__setattr__(self, "a1", self.a1 % self.n)
        object.__setattr__(self, "a2", self.a2 % self.n)

    @classmethod
    def all(cls, n: int) -> List["LatticeIndex"]:
        """All N^2 indices in lexicographic order."""
        return [cls(a1, a2, n) for a1, a2 in itertools.product(range(n), repeat=2)]

    @property
    def is_zero(self) -> bool:
        return self.a1 == 0 and self.a2 == 0

    @property
    def dtau(self) -> float:
        """d omega_alpha / d tau."""
        return self.a2 / self.n

    def omega(self, tau: complex) -> complex:
        return (self.a1 + self.a2 * tau) / self.n

    def as_tuple(self) -> Tuple[int, int]:
        return self.a1, self.a2

    def __neg__(self) -> "LatticeIndex":
        return LatticeIndex(-self.a1, -self.a2, self.n)

    def __add__(self, other: "LatticeIndex") -> "LatticeIndex":
        return LatticeIndex(self.a1 + other.a1, self.a2 + other.a2, self.n)


@dataclass(frozen=True)
class TensorLayout:
    """Tensor power Mat(N, C)^{tensor n_factors}; slots are numbered from 1."""

    n_factors: int
    factor_dim: int

    @property
    def dim(self) -> int:
        return self.factor_dim ** self.n_factors

    def check_slot(self, slot: int):
        if not 1 <= slot <= self.n_factors:
            raise DimensionError(
                f"Slot {slot} outside 1..{self.n_factors}",
                expected=(1, self.n_factors),
                actual=slot,
            )


IndexLike = Union[LatticeIndex, Tuple[int, int]]


def _integer_pair(alpha: IndexLike) -> Tuple[int, int]:
    if isinstance(alpha, LatticeIndex):
        return alpha.as_tuple()
    return int(alpha[0]), int(alpha[1])


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def gen_q(n: int) -> np.ndarray:
    """Clock matrix Q = diag(exp(2 pi i k / N)), k = 1..N."""
    k = np.arange(1, n + 1)
    return _frozen(np.diag(np.exp(2j * math.pi * k / n)))


@lru_cache(maxsize=None)
def gen_lambda(n: int) -> np.ndarray:
    """Cyclic shift Lambda with Lambda[k, k+1 mod N] = 1."""
    return _frozen(np.roll(np.eye(n, dtype=complex), 1, axis=1))


@lru_cache(maxsize=None)
def _t_reduced(r1: int, r2: int, n: int) -> np.ndarray:
    phase = np.exp(1j * math.pi * r1 * r2 / n)
    return phase * np.linalg.matrix_power(gen_q(n), r1) @ np.linalg.matrix_power(gen_lambda(n), r2)


@lru_cache(maxsize=None)
def _t_basis_cached(a1: int, a2: int, n: int) -> np.ndarray:
    b1, r1 = divmod(a1, n)
    b2, r2 = divmod(a2, n)
    # T_{r + N b} = (-1)^{r1 b2 + b1 r2 + N b1 b2} T_r
    sign = -1.0 if (r1 * b2 + b1 * r2 + n * b1 * b2) % 2 else 1.0
    return _frozen(sign * _t_reduced(r1, r2, n))


def t_basis(alpha: IndexLike, n: int) -> np.ndarray:
    """
    Sin-algebra basis element T_alpha = exp(pi i a1 a2 / N) Q^a1 Lambda^a2.

    Any integer pair is accepted. Out-of-range pairs are computed from the
    reduced representative times the sign picked up by Q^N = Lambda^N = 1.

    Args:
        alpha (LatticeIndex or tuple): The index (a1, a2)
        n (int): Matrix size N

    Returns:
        np.ndarray: Read-only N x N matrix.
    """
    a1, a2 = _integer_pair(alpha)
    return _t_basis_cached(a1, a2, n)


def kappa(alpha: IndexLike, beta: IndexLike, n: int) -> complex:
    """Structure constant of T_alpha T_beta = kappa T_{alpha+beta} for integer pairs."""
    a1, a2 = _integer_pair(alpha)
    b1, b2 = _integer_pair(beta)
    return complex(np.exp(1j * math.pi / n * (b1 * a2 - b2 * a1)))


def kron(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    for m in (m1, m2):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"kron expects square matrices, got shape {m.shape}", actual=m.shape)
    return np.kron(m1, m2)


def identity(layout: TensorLayout) -> np.ndarray:
    return np.eye(layout.dim, dtype=complex)


def tensor_embed_many(factors: dict, layout: TensorLayout) -> np.ndarray:
    """
    Embed single-slot matrices into the tensor power.

    Args:
        factors (dict): Mapping slot -> N x N matrix; other slots get the identity
        layout (TensorLayout): Target tensor power

    Returns:
        np.ndarray: The kron chain 1 x ... x m_a x ... x m_b x ... x 1
    """
    eye = np.eye(layout.factor_dim, dtype=complex)
    for slot, m in factors.items():
        layout.check_slot(slot)
        if m.shape != (layout.factor_dim, layout.factor_dim):
            raise DimensionError(
                f"Factor for slot {slot} has shape {m.shape}, expected N = {layout.factor_dim}",
                expected=(layout.factor_dim, layout.factor_dim),
                actual=m.shape,
            )
    chain = [factors.get(slot, eye) for slot in range(1, layout.n_factors + 1)]
    return reduce(kron, chain)


def tensor_embed(m: np.ndarray, slot: int, layout: TensorLayout) -> np.ndarray:
    """Embed an N x N matrix into slot ``slot`` (1-based) of the tensor power."""
    return tensor_embed_many({slot: m}, layout)


def _check_pair(a: int, b: int, layout: TensorLayout):
    layout.check_slot(a)
    layout.check_slot(b)
    if a == b:
        raise DimensionError(f"Slots must differ, got a = b = {a}", actual=(a, b))


@lru_cache(maxsize=4096)
def basis_pair(alpha: LatticeIndex, a: int, b: int, layout: TensorLayout) -> np.ndarray:
    """T_alpha in slot a times T_{-alpha} in slot b (integer negation)."""
    _check_pair(a, b, layout)
    a1, a2 = alpha.as_tuple()
    n = layout.factor_dim
    return _frozen(tensor_embed_many({a: t_basis((a1, a2), n), b: t_basis((-a1, -a2), n)}, layout))


@lru_cache(maxsize=256)
def basis_pair_stack(a: int, b: int, layout: TensorLayout) -> np.ndarray:
    """Stack of ``basis_pair`` over all alpha in lexicographic order, shape (N^2, dim, dim)."""
    indices = LatticeIndex.all(layout.factor_dim)
    return _frozen(np.stack([basis_pair(alpha, a, b, layout) for alpha in indices]))


@lru_cache(maxsize=256)
def permutation_p(a: int, b: int, layout: TensorLayout) -> np.ndarray:
    """Permutation operator exchanging tensor slots a and b."""
    _check_pair(a, b, layout)
    n, dim = layout.factor_dim, layout.dim
    p = np.eye(dim, dtype=complex).reshape((n,) * layout.n_factors + (dim,))
    return _frozen(p.swapaxes(a - 1, b - 1).reshape(dim, dim))


def max_abs(m) -> float:
    """Max-abs-entry norm."""
    return float(np.max(np.abs(m)))


def product_scale(a: np.ndarray, b: np.ndarray) -> float:
    """Entry bound of |A| |B|, the magnitude of A B without cancellation."""
    return float(np.max(np.abs(a) @ np.abs(b)))
