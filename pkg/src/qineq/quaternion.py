"""Quaternion scalars and vectorized Hamilton arithmetic.

A quaternion x0 + x1 i + x2 j + x3 k is stored as four doubles. The array helpers
at the bottom of the module work on any ndarray whose last axis has length 4 and
are what the matrix layer is built on.
"""

import math
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .errors import DomainError

Real = Union[int, float]


class Quaternion(BaseModel):
    """An immutable quaternion x0 + x1 i + x2 j + x3 k."""

    model_config = ConfigDict(frozen=True)

    x0: float = Field(default=0.0, description="Real part")
    x1: float = Field(default=0.0, description="Coefficient of i")
    x2: float = Field(default=0.0, description="Coefficient of j")
    x3: float = Field(default=0.0, description="Coefficient of k")

    def __init__(self, x0: float = 0.0, x1: float = 0.0, x2: float = 0.0, x3: float = 0.0, **data):
        super().__init__(x0=x0, x1=x1, x2=x2, x3=x3, **data)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Quaternion":
        """Build from the 4-array [x0, x1, x2, x3]."""
        if len(values) != 4:
            raise DomainError(f"quaternion needs 4 components, got {len(values)}")
        return cls(*(float(v) for v in values))

    def to_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3], dtype=float)

    def to_list(self) -> list[float]:
        return [self.x0, self.x1, self.x2, self.x3]

    @property
    def real(self) -> float:
        return self.x0

    @property
    def imag(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)

    def is_real(self, tol: float | None = None) -> bool:
        tol = settings.scalar_tol if tol is None else tol
        return math.hypot(self.x1, self.x2, self.x3) <= tol * max(1.0, abs(self))

    # Arithmetic

    def __add__(self, other: Union["Quaternion", Real]) -> "Quaternion":
        other = _coerce(other)
        return Quaternion(self.x0 + other.x0, self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3)

    __radd__ = __add__

    def __sub__(self, other: Union["Quaternion", Real]) -> "Quaternion":
        return self + (-_coerce(other))

    def __rsub__(self, other: Real) -> "Quaternion":
        return _coerce(other) - self

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other: Union["Quaternion", Real]) -> "Quaternion":
        return mul(self, _coerce(other))

    def __rmul__(self, other: Real) -> "Quaternion":
        # Reals are central, so left and right scaling agree.
        return mul(_coerce(other), self)

    def __truediv__(self, other: Real) -> "Quaternion":
        if isinstance(other, Quaternion):
            raise TypeError("quaternion division is ambiguous; multiply by inv() on the intended side")
        if other == 0:
            raise DomainError("non-invertible quaternion")
        return self * (1.0 / other)

    def __pow__(self, exponent: int) -> "Quaternion":
        if not isinstance(exponent, int) or exponent < 0:
            raise DomainError(f"only non-negative integer powers are defined, got {exponent!r}")
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __abs__(self) -> float:
        return math.hypot(self.x0, self.x1, self.x2, self.x3)

    def conj(self) -> "Quaternion":
        return conj(self)

    def inv(self) -> "Quaternion":
        return inv(self)

    def __repr__(self) -> str:
        return f"Quaternion({self.x0!r}, {self.x1!r}, {self.x2!r}, {self.x3!r})"


def _coerce(value: Union[Quaternion, Real]) -> Quaternion:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Quaternion(float(value))
    raise TypeError(f"cannot combine a quaternion with {type(value).__name__}")


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a*b."""
    return Quaternion(
        a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3,
        a.x0 * b.x1 + a.x1 * b.x0 + a.x2 * b.x3 - a.x3 * b.x2,
        a.x0 * b.x2 - a.x1 * b.x3 + a.x2 * b.x0 + a.x3 * b.x1,
        a.x0 * b.x3 + a.x1 * b.x2 - a.x2 * b.x1 + a.x3 * b.x0,
    )


def conj(a: Quaternion) -> Quaternion:
    return Quaternion(a.x0, -a.x1, -a.x2, -a.x3)


def inv(a: Quaternion) -> Quaternion:
    """Two-sided inverse conj(a)/|a|^2."""
    norm_sq = a.x0 * a.x0 + a.x1 * a.x1 + a.x2 * a.x2 + a.x3 * a.x3
    if norm_sq == 0.0:
        raise DomainError("non-invertible quaternion")
    return conj(a) * (1.0 / norm_sq)


def isclose(lhs: Quaternion, rhs: Quaternion, tol: float | None = None) -> bool:
    """Componentwise comparison with |d| <= tol * max(1, |lhs|, |rhs|)."""
    tol = settings.scalar_tol if tol is None else tol
    lhs, rhs = _coerce(lhs), _coerce(rhs)
    scale = tol * max(1.0, abs(lhs), abs(rhs))
    return all(abs(a - b) <= scale for a, b in zip(lhs.to_list(), rhs.to_list()))


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
BASIS = (ONE, I, J, K)


# Vectorized arithmetic on (..., 4) arrays


def hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise Hamilton product of broadcastable (..., 4) arrays."""
    a0, a1, a2, a3 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    b0, b1, b2, b3 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def conj_array(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def complex_parts(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split q = A + B j with A = x0 + x1 i and B = x2 + x3 i."""
    a = np.asarray(a, dtype=float)
    return a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3]


def from_complex_parts(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Inverse of complex_parts: (A, B) -> A + B j as a (..., 4) array."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return np.stack([A.real, A.imag, B.real, B.imag], axis=-1)
