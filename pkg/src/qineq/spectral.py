"""Spherical spectrum, spectral radius, bounds and the resolvent series.

The spherical spectrum of T is the set of quaternions q for which
delta_q(T) = T^2 - T (q + conj q) + I |q|^2 is not invertible. In finite dimension it
coincides with the point spectrum and is a finite union of 2-spheres
{re + im u : u a unit imaginary quaternion}, each stored by its representative
(re, im) with im >= 0. The eigenvalues of chi(T) come in conjugate pairs
{re + i im, re - i im}; one sphere per pair.

Residual and continuous spherical spectra are empty in finite dimension: a delta
with trivial kernel is a bijection of H^n and its inverse is bounded.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .errors import ConvergenceRegionError, SpectralComputationError, UsageError
from .models import ChainReport, Witness
from .qlinalg import (
    QMatrix,
    QVector,
    apply,
    chi,
    chi_inv,
    identity,
    is_selfadjoint,
    matmul,
    op_norm,
)
from .quaternion import ONE, Quaternion, conj

logger = logging.getLogger(__name__)


class Sphere(BaseModel):
    """One eigen-sphere; im == 0 is a single real point."""

    re: float
    im: float = Field(..., ge=0.0)
    mult: int = Field(default=1, ge=1)

    @property
    def radius(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def representative(self) -> Quaternion:
        return Quaternion(self.re, self.im)

    def contains(self, q: Quaternion, tol: float = 1e-9) -> bool:
        """q lies on the sphere: same real part and same imaginary modulus."""
        return abs(q.x0 - self.re) <= tol and abs(math.hypot(*q.imag) - self.im) <= tol


class SphericalSpectrum(BaseModel):
    spheres: list[Sphere]

    @property
    def dimension(self) -> int:
        return sum(s.mult for s in self.spheres)

    def points(self) -> np.ndarray:
        """Representatives as complex numbers re + i im."""
        return np.array([complex(s.re, s.im) for s in self.spheres])

    def is_real(self) -> bool:
        return all(s.im == 0.0 for s in self.spheres)

    def to_json(self) -> dict:
        return {"spheres": [s.model_dump() for s in self.spheres]}


class SpectralBounds(BaseModel):
    m_T: float
    M_T: float


class ResolventResult(BaseModel):
    """Partial sum of the resolvent series with its diagnostics."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    matrix: QMatrix
    terms: int = Field(..., description="Index N of the last term summed")
    tail_bound: float = Field(..., description="Bound on the norm of the neglected tail")
    residual: float = Field(..., description="||delta_q(T) R - I||")
    direct_error: float = Field(..., description="||R - delta_q(T)^-1|| / ||delta_q(T)^-1||")


def _as_quaternion(q: Union[Quaternion, float, complex]) -> Quaternion:
    if isinstance(q, Quaternion):
        return q
    if isinstance(q, complex):
        return Quaternion(q.real, q.imag)
    return Quaternion(float(q))


def delta(T: QMatrix, q: Union[Quaternion, float, complex]) -> QMatrix:
    """T^2 - T (2 Re q) + I |q|^2; both coefficients are real."""
    q = _as_quaternion(q)
    return matmul(T, T) - T * (2.0 * q.x0) + identity(T.n) * (abs(q) ** 2)


def _delta_block(H: np.ndarray, re: float, modulus_sq: float) -> np.ndarray:
    return H @ H - 2.0 * re * H + modulus_sq * np.eye(H.shape[0])


def _eigenvalues(T: QMatrix) -> np.ndarray:
    H = chi(T).matrix
    try:
        if is_selfadjoint(T):
            return scipy.linalg.eigvalsh((H + H.conj().T) / 2).astype(complex)
        return scipy.linalg.eigvals(H)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SpectralComputationError(f"eigensolver failed: {e}") from e


def _coalesce(eigenvalues: np.ndarray, merge_tol: float) -> list[Sphere]:
    points = sorted((float(z.real), abs(float(z.imag))) for z in eigenvalues)
    points = [(re, 0.0 if im <= merge_tol else im) for re, im in points]
    clusters: list[list[tuple[float, float]]] = []
    for point in points:
        if clusters and math.dist(clusters[-1][0], point) <= merge_tol:
            clusters[-1].append(point)
        else:
            clusters.append([point])
    spheres = []
    for cluster in clusters:
        re = sum(p[0] for p in cluster) / len(cluster)
        im = sum(p[1] for p in cluster) / len(cluster)
        spheres.append(Sphere(re=re, im=im, mult=max(1, round(len(cluster) / 2))))
    return spheres


def spectrum(T: QMatrix, verify: bool = True) -> SphericalSpectrum:
    """Spherical point spectrum via the eigenvalues of chi(T).

    With verify, every representative q is checked to make delta_q(T) singular.
    """
    norm = op_norm(T)
    spheres = _coalesce(_eigenvalues(T), settings.merge_tol * max(1.0, norm))
    result = SphericalSpectrum(spheres=spheres)
    if result.dimension != T.n:
        logger.warning(f"Sphere multiplicities sum to {result.dimension}, expected {T.n}")
    if verify:
        bound = settings.rank_tol * max(1.0, norm**2)
        for sphere in spheres:
            smallest = float(scipy.linalg.svdvals(chi(delta(T, sphere.representative)).matrix)[-1])
            if smallest > bound:
                raise SpectralComputationError(
                    f"representative ({sphere.re:.6g}, {sphere.im:.6g}) leaves delta invertible "
                    f"(smallest singular value {smallest:.3e} > {bound:.3e})"
                )
    return result


def residual_spectrum(T: QMatrix) -> list[Sphere]:
    """Always empty for operators on H^n."""
    return []


def continuous_spectrum(T: QMatrix) -> list[Sphere]:
    """Always empty for operators on H^n."""
    return []


def right_eigenvalue_residual(T: QMatrix, u: QVector, q: Quaternion) -> float:
    """||T u - u q|| / ||u||, zero when u is an eigenvector with right eigenvalue q."""
    return (apply(T, u) - u.scale(q)).norm() / u.norm()


def spectral_radius(T: QMatrix, sigma: Optional[SphericalSpectrum] = None) -> float:
    sigma = sigma or spectrum(T)
    return max(s.radius for s in sigma.spheres)


def bounds(T: QMatrix) -> SpectralBounds:
    """m_T = min and M_T = max of the real spectrum of a selfadjoint T."""
    if not is_selfadjoint(T):
        raise UsageError("spectral bounds need a selfadjoint operator")
    values = [s.re for s in spectrum(T).spheres]
    return SpectralBounds(m_T=min(values), M_T=max(values))


def series_coefficient(q: Quaternion, n: int) -> float:
    """a_n = |q|^(-2n-2) sum_{h=0..n} q^h conj(q)^(n-h).

    Terms h and n-h are conjugate to each other, so they are summed as X + conj(X) and
    the result is real by construction.
    """
    modulus = abs(q)
    if modulus == 0.0:
        raise UsageError("series coefficients need q != 0")
    w = q * (1.0 / modulus)
    powers = [ONE]
    for _ in range(n):
        powers.append(powers[-1] * w)
    total = Quaternion()
    for h in range(n // 2 + 1):
        term = powers[h] * conj(powers[n - h])
        total = total + (term if 2 * h == n else term + conj(term))
    return total.x0 * modulus ** (-n - 2)


def _tail(rho: float, N: int) -> float:
    """sum_{n>N} (n+1) rho^n."""
    return rho ** (N + 1) * ((N + 2) - (N + 1) * rho) / (1.0 - rho) ** 2


def resolvent_series(T: QMatrix, q: Union[Quaternion, float], rel_tol: float = 1e-12) -> ResolventResult:
    """Partial sum of sum_n T^n a_n converging to delta_q(T)^-1 for |q| > ||T||.

    N is the first index whose tail bound sum_{n>N} (n+1) ||T||^n / |q|^(n+2) is at
    most rel_tol. The result must satisfy ||delta R - I|| <= 10 rel_tol max(1, ||delta||).
    """
    q = _as_quaternion(q)
    norm = op_norm(T)
    modulus = abs(q)
    if not modulus > norm:
        raise ConvergenceRegionError(
            f"outside guaranteed convergence region: |q| = {modulus:.6g} <= ||T|| = {norm:.6g}"
        )
    rho = norm / modulus
    N = 0
    while _tail(rho, N) / modulus**2 > rel_tol:
        N += 1
        if N > settings.max_series_terms:
            raise ConvergenceRegionError(f"series needs more than {settings.max_series_terms} terms (rho = {rho:.6g})")
    H = chi(T).matrix
    power = np.eye(H.shape[0], dtype=complex)
    total = np.zeros_like(power)
    for n in range(N + 1):
        total = total + series_coefficient(q, n) * power
        power = power @ H
    D = _delta_block(H, q.x0, modulus**2)
    eye = np.eye(H.shape[0])
    residual = float(np.linalg.norm(D @ total - eye, 2))
    limit = 10.0 * rel_tol * max(1.0, float(np.linalg.norm(D, 2)))
    if residual > limit:
        logger.error(f"Resolvent residual {residual:.3e} above {limit:.3e} after N={N} terms")
        raise SpectralComputationError(f"resolvent residual {residual:.3e} exceeds 10 rel_tol max(1, ||delta||) = {limit:.3e}")
    direct = np.linalg.inv(D)
    direct_error = float(np.linalg.norm(total - direct, 2) / np.linalg.norm(direct, 2))
    logger.debug(f"Resolvent series summed N={N} terms, residual {residual:.3e}")
    return ResolventResult(
        matrix=chi_inv((total + _structure_mirror(total)) / 2),
        terms=N,
        tail_bound=_tail(rho, N) / modulus**2,
        residual=residual,
        direct_error=direct_error,
    )


def _structure_mirror(M: np.ndarray) -> np.ndarray:
    """-J conj(M) J, equal to M on the image of chi."""
    n = M.shape[0] // 2
    A, B = M[:n, :n], M[:n, n:]
    C, D = M[n:, :n], M[n:, n:]
    return np.block([[D.conj(), -C.conj()], [-B.conj(), A.conj()]])


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    distances = np.abs(a[:, None] - b[None, :])
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def spectrum_algebra_checks(
    S: QMatrix, T: QMatrix, check_sum: bool = False, witness: Optional[Witness] = None
) -> list[ChainReport]:
    """Product-swap and commuting-sum spectrum facts, as residual <= bound chains.

    The sum containment is only checked for commuting selfadjoint pairs, whose
    spectra are real so sphere sums are plain sums.
    """
    if S.n != T.n:
        raise UsageError(f"dimension mismatch: {S.n} vs {T.n}")
    scale = max(1.0, op_norm(S) * op_norm(T))
    ST, TS = matmul(S, T), matmul(T, S)
    sigma_st, sigma_ts = spectrum(ST), spectrum(TS)
    with_zero = np.array([0j])
    distance = _hausdorff(np.concatenate([sigma_st.points(), with_zero]), np.concatenate([sigma_ts.points(), with_zero]))
    radius_gap = abs(spectral_radius(ST, sigma_st) - spectral_radius(TS, sigma_ts))
    reports = [
        ChainReport.evaluate(
            "spectrum-algebra/product-swap",
            [("hausdorff(sigma(ST)+0, sigma(TS)+0)", distance), ("1e-8 * scale", 1e-8 * scale)],
            tol=0.0,
            witness=witness,
        ),
        ChainReport.evaluate(
            "spectrum-algebra/radius-swap",
            [("|r(ST) - r(TS)|", radius_gap), ("1e-9 * scale", 1e-9 * scale)],
            tol=0.0,
            witness=witness,
        ),
    ]
    if check_sum:
        if op_norm(ST - TS) > settings.classify_tol * scale:
            raise UsageError("sum containment needs a commuting pair")
        if not (is_selfadjoint(S) and is_selfadjoint(T)):
            raise UsageError("sum containment is only checked for selfadjoint pairs")
        sums = np.array([a.re + b.re for a in spectrum(S).spheres for b in spectrum(T).spheres])
        worst = max(float(np.abs(sums - s.re).min()) for s in spectrum(S + T).spheres)
        reports.append(
            ChainReport.evaluate(
                "spectrum-algebra/commuting-sum",
                [("max distance of sigma(S+T) to sigma(S)+sigma(T)", worst), ("1e-8 * scale", 1e-8 * scale)],
                tol=0.0,
                witness=witness,
            )
        )
    return reports
