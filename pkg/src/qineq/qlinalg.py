"""Right quaternionic vector space H^n and its right-linear operators.

Vectors are (n, 4) arrays and matrices (n, n, 4) arrays of quaternion components.
Scalars act on vectors from the right, matrix entries multiply components from the
left, so T(u p + v) = (T u) p + T v holds exactly.

Spectral quantities go through the complex embedding chi, which writes every entry
as A + B j and maps T to the 2n x 2n complex matrix [[A, B], [-conj(B), conj(A)]].
"""

import logging
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings
from .errors import DomainError, StructureError, UsageError
from .quaternion import (
    Quaternion,
    complex_parts,
    conj_array,
    from_complex_parts,
    hamilton,
)

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator]


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


class QVector(BaseModel):
    """A vector in H^n stored as an (n, 4) array."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray = Field(..., description="Quaternion components, shape (n, 4)")

    @field_validator("entries", mode="before")
    @classmethod
    def _check_entries(cls, value):
        array = np.asarray(value, dtype=float)
        if array.ndim != 2 or array.shape[1] != 4 or array.shape[0] < 1:
            raise ValueError(f"vector entries must have shape (n, 4) with n >= 1, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("vector entries must be finite")
        return _readonly(array)

    @classmethod
    def from_quaternions(cls, values: Iterable[Quaternion]) -> "QVector":
        return cls(entries=[q.to_list() for q in values])

    @classmethod
    def basis(cls, n: int, k: int = 0) -> "QVector":
        """The standard basis vector e_{k+1}."""
        entries = np.zeros((n, 4))
        entries[k, 0] = 1.0
        return cls(entries=entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, k: int) -> Quaternion:
        return Quaternion.from_array(self.entries[k])

    def __len__(self) -> int:
        return self.n

    def __add__(self, other: "QVector") -> "QVector":
        _same_dim(self.n, other.n)
        return QVector(entries=self.entries + other.entries)

    def __sub__(self, other: "QVector") -> "QVector":
        _same_dim(self.n, other.n)
        return QVector(entries=self.entries - other.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, QVector) and np.array_equal(self.entries, other.entries)

    def scale(self, p: Union[Quaternion, float]) -> "QVector":
        """Right scalar action (u p)_k = u_k p."""
        if not isinstance(p, Quaternion):
            p = Quaternion(float(p))
        return QVector(entries=hamilton(self.entries, p.to_array()[None, :]))

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def to_list(self) -> list[list[float]]:
        return self.entries.tolist()


class QMatrix(BaseModel):
    """An n x n quaternion matrix acting right-linearly on H^n."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray = Field(..., description="Quaternion components, shape (n, n, 4), row-major")

    @field_validator("entries", mode="before")
    @classmethod
    def _check_entries(cls, value):
        array = np.asarray(value, dtype=float)
        if array.ndim != 3 or array.shape[2] != 4 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise ValueError(f"matrix entries must have shape (n, n, 4) with n >= 1, got {array.shape}")
        if array.shape[0] > settings.max_dim:
            raise ValueError(f"dimension {array.shape[0]} exceeds the supported maximum {settings.max_dim}")
        if not np.all(np.isfinite(array)):
            raise ValueError("matrix entries must be finite")
        return _readonly(array)

    @classmethod
    def from_quaternions(cls, rows: Sequence[Sequence[Union[Quaternion, float]]]) -> "QMatrix":
        return cls(
            entries=[
                [(q if isinstance(q, Quaternion) else Quaternion(float(q))).to_list() for q in row]
                for row in rows
            ]
        )

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, index: tuple[int, int]) -> Quaternion:
        return Quaternion.from_array(self.entries[index])

    def __add__(self, other: "QMatrix") -> "QMatrix":
        _same_dim(self.n, other.n)
        return QMatrix(entries=self.entries + other.entries)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        _same_dim(self.n, other.n)
        return QMatrix(entries=self.entries - other.entries)

    def __neg__(self) -> "QMatrix":
        return QMatrix(entries=-self.entries)

    def __mul__(self, scalar: float) -> "QMatrix":
        # Reals are central, so real scaling is unambiguous.
        return QMatrix(entries=self.entries * float(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: Union["QMatrix", QVector]):
        if isinstance(other, QVector):
            return apply(self, other)
        return matmul(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and np.array_equal(self.entries, other.entries)

    def adjoint(self) -> "QMatrix":
        return adjoint(self)

    def to_list(self) -> list[list[list[float]]]:
        return self.entries.tolist()


class ComplexBlock(BaseModel):
    """A 2n x 2n complex matrix in the image of chi."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1, description="Quaternionic dimension")
    matrix: np.ndarray = Field(..., description="Complex matrix, shape (2n, 2n)")

    @model_validator(mode="after")
    def _check_shape(self) -> "ComplexBlock":
        if self.matrix.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"expected a {2 * self.n}x{2 * self.n} matrix, got {self.matrix.shape}")
        return self

    def structure_residual(self) -> float:
        """Spectral norm of M + J conj(M) J; zero on the image of chi."""
        J = symplectic_unit(self.n)
        return float(np.linalg.norm(self.matrix + J @ self.matrix.conj() @ J, 2))


class OperatorClass(BaseModel):
    """Class flags of an operator."""

    selfadjoint: bool
    normal: bool
    unitary: bool
    positive: bool


class MatrixFile(BaseModel):
    """JSON file format for matrices."""

    n: int = Field(..., ge=1)
    entries: list[list[tuple[float, float, float, float]]]

    @model_validator(mode="after")
    def _check_square(self) -> "MatrixFile":
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must be {self.n} rows of {self.n} quaternions")
        return self


class VectorFile(BaseModel):
    """JSON file format for vectors."""

    n: int = Field(..., ge=1)
    entries: list[tuple[float, float, float, float]]

    @model_validator(mode="after")
    def _check_length(self) -> "VectorFile":
        if len(self.entries) != self.n:
            raise ValueError(f"entries must hold {self.n} quaternions")
        return self


def _same_dim(a: int, b: int) -> None:
    if a != b:
        raise UsageError(f"dimension mismatch: {a} vs {b}")


# Constructors


def identity(n: int) -> QMatrix:
    entries = np.zeros((n, n, 4))
    entries[np.arange(n), np.arange(n), 0] = 1.0
    return QMatrix(entries=entries)


def zeros(n: int) -> QMatrix:
    return QMatrix(entries=np.zeros((n, n, 4)))


def diag(values: Sequence[Union[float, Quaternion]]) -> QMatrix:
    n = len(values)
    entries = np.zeros((n, n, 4))
    for k, value in enumerate(values):
        entries[k, k] = value.to_array() if isinstance(value, Quaternion) else [float(value), 0.0, 0.0, 0.0]
    return QMatrix(entries=entries)


# Core operations


def inner(u: QVector, v: QVector) -> Quaternion:
    """<u, v> = sum_k conj(u_k) v_k, right-linear in v."""
    _same_dim(u.n, v.n)
    return Quaternion.from_array(hamilton(conj_array(u.entries), v.entries).sum(axis=0))


def apply(T: QMatrix, u: QVector) -> QVector:
    """(T u)_r = sum_c T_rc u_c."""
    _same_dim(T.n, u.n)
    return QVector(entries=hamilton(T.entries, u.entries[None, :, :]).sum(axis=1))


def matmul(S: QMatrix, T: QMatrix) -> QMatrix:
    _same_dim(S.n, T.n)
    return QMatrix(entries=hamilton(S.entries[:, :, None, :], T.entries[None, :, :, :]).sum(axis=1))


def adjoint(T: QMatrix) -> QMatrix:
    """Conjugate transpose."""
    return QMatrix(entries=conj_array(np.swapaxes(T.entries, 0, 1)))


def symplectic_unit(n: int) -> np.ndarray:
    """J = [[0, I_n], [-I_n, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]]).astype(complex)


def chi(T: QMatrix) -> ComplexBlock:
    A, B = complex_parts(T.entries)
    return ComplexBlock(n=T.n, matrix=np.block([[A, B], [-B.conj(), A.conj()]]))


def chi_inv(M: Union[ComplexBlock, np.ndarray], structure_tol: float | None = None) -> QMatrix:
    """Left inverse of chi, reading A and B from the top block row."""
    if not isinstance(M, ComplexBlock):
        matrix = np.asarray(M, dtype=complex)
        M = ComplexBlock(n=matrix.shape[0] // 2, matrix=matrix)
    structure_tol = settings.structure_tol if structure_tol is None else structure_tol
    residual = M.structure_residual()
    if residual > structure_tol * max(1.0, float(np.linalg.norm(M.matrix, 2))):
        raise StructureError(f"not in quaternionic image (structure residual {residual:.3e})")
    n = M.n
    return QMatrix(entries=from_complex_parts(M.matrix[:n, :n], M.matrix[:n, n:]))


def op_norm(T: QMatrix) -> float:
    """Operator norm, the largest singular value of chi(T)."""
    return float(scipy.linalg.svdvals(chi(T).matrix)[0])


def classify(T: QMatrix, tol: float | None = None) -> OperatorClass:
    """Selfadjoint, normal, unitary and positive flags with scale-free tolerance."""
    norm = op_norm(T)
    if tol is None:
        tol = settings.classify_tol * max(1.0, norm)
    Ts = adjoint(T)
    selfadjoint = op_norm(T - Ts) <= tol
    normal = op_norm(matmul(T, Ts) - matmul(Ts, T)) <= tol
    unitary = op_norm(matmul(T, Ts) - identity(T.n)) <= tol
    positive = False
    if selfadjoint:
        # chi(T) eigenvalues are the real spectrum of T, each doubled.
        H = chi(T).matrix
        positive = float(scipy.linalg.eigvalsh((H + H.conj().T) / 2)[0]) >= -tol
    return OperatorClass(selfadjoint=selfadjoint, normal=normal, unitary=unitary, positive=positive)


def is_selfadjoint(T: QMatrix) -> bool:
    return classify(T).selfadjoint


def hermitian_part(T: QMatrix) -> QMatrix:
    """(T + T*)/2, used to remove rounding asymmetry."""
    return (T + adjoint(T)) * 0.5


# Random instances


def make_rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_quaternion_matrix(n: int, seed: Seed) -> QMatrix:
    """Matrix with independent standard normal components."""
    return QMatrix(entries=make_rng(seed).standard_normal((n, n, 4)))


def random_unitary(n: int, seed: Seed) -> QMatrix:
    """Quaternionic unitary from Gram-Schmidt on a standard normal matrix.

    Each column is orthogonalized twice against the previous ones; projections
    use e_k <e_k, v> so the scalar sits on the right.
    """
    rng = make_rng(seed)
    columns = rng.standard_normal((n, n, 4))
    basis: list[np.ndarray] = []
    for c in range(n):
        v = columns[:, c, :]
        for _ in range(2):
            for e in basis:
                coefficient = hamilton(conj_array(e), v).sum(axis=0)
                v = v - hamilton(e, coefficient[None, :])
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise DomainError("degenerate column during orthonormalization")
        basis.append(v / norm)
    return QMatrix(entries=np.stack(basis, axis=1))


def _spectrum_diagonal(n: int, m: float, M: float, rng: np.random.Generator) -> np.ndarray:
    d = rng.uniform(m, M, size=n)
    if n >= 2:
        d[0], d[1] = m, M
        rng.shuffle(d)
    return d


def _check_interval(n: int, m: float, M: float) -> None:
    if n < 1 or n > settings.max_dim:
        raise UsageError(f"dimension must be in [1, {settings.max_dim}], got {n}")
    if not m < M:
        raise UsageError(f"spectrum bounds need m < M, got m={m}, M={M}")


def conjugate_diagonal(U: QMatrix, d: Sequence[float]) -> QMatrix:
    """U diag(d) U* for real d, made exactly selfadjoint."""
    scaled = QMatrix(entries=U.entries * np.asarray(d, dtype=float)[None, :, None])
    return hermitian_part(matmul(scaled, adjoint(U)))


def random_selfadjoint(n: int, m: float, M: float, seed: Seed) -> QMatrix:
    """Selfadjoint T = U D U* with spectrum in [m, M], both endpoints attained when n >= 2."""
    _check_interval(n, m, M)
    rng = make_rng(seed)
    d = _spectrum_diagonal(n, m, M, rng)
    if n == 1:
        return diag([float(d[0])])
    T = conjugate_diagonal(random_unitary(n, rng), d)
    logger.debug(f"Generated selfadjoint n={n} spectrum in [{m}, {M}]")
    return T


def random_commuting_selfadjoint_pair(n: int, m: float, M: float, seed: Seed) -> tuple[QMatrix, QMatrix]:
    """Two selfadjoint operators diagonalized by one unitary, hence commuting."""
    _check_interval(n, m, M)
    rng = make_rng(seed)
    U = random_unitary(n, rng)
    return (
        conjugate_diagonal(U, _spectrum_diagonal(n, m, M, rng)),
        conjugate_diagonal(U, _spectrum_diagonal(n, m, M, rng)),
    )


def random_unit_vector(n: int, seed: Seed) -> QVector:
    if n < 1:
        raise UsageError(f"dimension must be positive, got {n}")
    entries = make_rng(seed).standard_normal((n, 4))
    norm = np.linalg.norm(entries)
    if norm == 0.0:
        return QVector.basis(n)
    return QVector(entries=entries / norm)


# File formats


def matrix_to_json(T: QMatrix) -> dict:
    return {"n": T.n, "entries": T.to_list()}


def vector_to_json(u: QVector) -> dict:
    return {"n": u.n, "entries": u.to_list()}


def parse_matrix(text: str) -> QMatrix:
    """Parse the matrix JSON format; raises pydantic.ValidationError on bad input."""
    parsed = MatrixFile.model_validate_json(text)
    return QMatrix(entries=parsed.entries)


def parse_vector(text: str) -> QVector:
    parsed = VectorFile.model_validate_json(text)
    return QVector(entries=parsed.entries)


def load_matrix(path: Union[str, Path]) -> QMatrix:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))
