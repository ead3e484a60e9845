"""Dense complex linear algebra for small matrices.

Matrices are plain ``numpy`` arrays of dtype complex128. Every function here is
pure; tolerances come from :class:`~nhsense.core.config.Config` and are
relative to the Frobenius norm of the input.
"""

import itertools

import numpy as np
import numpy.typing as npt
import scipy.linalg

from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import NotHermitian, NotPSD, ShapeMismatch, SingularMatrix

CMat = npt.NDArray[np.complex128]
RVec = npt.NDArray[np.float64]


def as_cmat(a: object, name: str = "matrix") -> CMat:
    """Coerce input to a 2-D complex128 array.

    Args:
        a: Array-like input
        name: Name used in error messages

    Returns:
        2-D complex array (a copy)

    Raises:
        ShapeMismatch: If the input is not two-dimensional
    """
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def require_square(a: CMat, name: str = "matrix") -> int:
    """Return the dimension of a square matrix or raise ShapeMismatch."""
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ShapeMismatch(f"{name} must be square and nonempty, got shape {a.shape}")
    return int(a.shape[0])


def frobenius(a: CMat) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a, "fro")) if a.size else 0.0


def dagger(a: CMat) -> CMat:
    """Conjugate transpose."""
    return a.conj().T


def hermitian_defect(a: CMat) -> float:
    """Largest entrywise deviation from Hermiticity, max |A_ij - conj(A_ji)|."""
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def is_hermitian(a: CMat, config: Config = DEFAULT_CONFIG) -> bool:
    """Check Hermiticity within ``hermitian_tol`` relative to the norm."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return hermitian_defect(a) <= config.hermitian_tol * max(frobenius(a), 1e-300)


def require_hermitian(a: CMat, name: str = "matrix", config: Config = DEFAULT_CONFIG) -> None:
    """Raise NotHermitian unless ``a`` is Hermitian within tolerance."""
    require_square(a, name)
    if not is_hermitian(a, config):
        raise NotHermitian(
            f"{name} is not Hermitian: defect {hermitian_defect(a):.3e} "
            f"exceeds {config.hermitian_tol:.1e} x |A|_F = {frobenius(a):.3e}"
        )


def inverse(a: CMat, config: Config = DEFAULT_CONFIG) -> CMat:
    """Invert a square matrix.

    Args:
        a: Square complex matrix
        config: Tolerances (``cond_max``)

    Returns:
        Inverse matrix

    Raises:
        ShapeMismatch: If ``a`` is not square
        SingularMatrix: If the 2-norm condition number exceeds ``cond_max``
    """
    require_square(a)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > config.cond_max:
        raise SingularMatrix(f"matrix condition number {cond:.3e} exceeds {config.cond_max:.1e}")
    try:
        return np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc


def determinant(a: CMat) -> complex:
    """Determinant of a square matrix."""
    require_square(a)
    return complex(np.linalg.det(a))


def _cofactor_adjugate(a: CMat) -> CMat:
    m = a.shape[0]
    if m == 1:
        return np.ones((1, 1), dtype=np.complex128)
    adj = np.empty((m, m), dtype=np.complex128)
    for i, j in itertools.product(range(m), range(m)):
        minor = np.delete(np.delete(a, i, axis=0), j, axis=1)
        # adj(A)_ji = (-1)^(i+j) det(minor_ij)
        adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def adjugate(a: CMat, config: Config = DEFAULT_CONFIG) -> CMat:
    """Adjugate matrix, defined for singular input as well.

    Cofactors are used for M <= 4 and for near-singular input
    (|det| < adjugate_det_threshold * |A|_F^M); otherwise det(A) * inv(A).
    """
    m = require_square(a)
    if m <= 4:
        return _cofactor_adjugate(a)
    det = np.linalg.det(a)
    scale = frobenius(a) ** m
    if abs(det) < config.adjugate_det_threshold * scale:
        return _cofactor_adjugate(a)
    try:
        return det * np.linalg.inv(a)
    except np.linalg.LinAlgError:
        return _cofactor_adjugate(a)


def _fix_column_phases(u: CMat) -> CMat:
    # Largest-magnitude component of each column made real-positive.
    out = u.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0:
            out[:, k] = col * (abs(pivot) / pivot)
    return out


def herm_eig(a: CMat, config: Config = DEFAULT_CONFIG) -> tuple[CMat, RVec]:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        a: Hermitian matrix
        config: Tolerances (``hermitian_tol``)

    Returns:
        Tuple (U, eigenvalues) with eigenvalues ascending and
        A = U diag(eigenvalues) U^dagger

    Raises:
        NotHermitian: If the Hermiticity check fails
    """
    require_hermitian(a, config=config)
    sym = (a + dagger(a)) / 2
    values, vectors = scipy.linalg.eigh(sym)
    return _fix_column_phases(vectors.astype(np.complex128)), values.astype(np.float64)


def min_eigenvalue(a: CMat, config: Config = DEFAULT_CONFIG) -> float:
    """Smallest eigenvalue of a Hermitian matrix (0 for an empty matrix)."""
    if a.size == 0:
        return 0.0
    _, values = herm_eig(a, config)
    return float(values[0])


def is_psd(a: CMat, config: Config = DEFAULT_CONFIG) -> bool:
    """Positive semidefinite within ``psd_tol`` relative to the norm."""
    if a.size == 0:
        return True
    return min_eigenvalue(a, config) >= -config.psd_tol * frobenius(a)


def psd_split(a: CMat, config: Config = DEFAULT_CONFIG) -> tuple[CMat, CMat]:
    """Split a Hermitian matrix into the difference of two PSD matrices.

    Returns:
        Tuple (Xplus, Xminus) with A = Xplus - Xminus, built as
        U diag((|L| +/- L)/2) U^dagger
    """
    u, values = herm_eig(a, config)
    plus = (np.abs(values) + values) / 2
    minus = (np.abs(values) - values) / 2
    x_plus = (u * plus) @ dagger(u)
    x_minus = (u * minus) @ dagger(u)
    return x_plus, x_minus


def psd_factor(g: CMat, config: Config = DEFAULT_CONFIG) -> CMat:
    """Factor a PSD matrix as G = Y Y^dagger.

    Args:
        g: Hermitian positive semidefinite M x M matrix
        config: Tolerances (``psd_tol``, ``rank_tol``)

    Returns:
        M x r matrix Y = U_r diag(sqrt(L_r)) over the numerically nonzero
        eigenvalues; r may be zero

    Raises:
        NotPSD: If the smallest eigenvalue is below -psd_tol * |G|_F
    """
    m = require_square(g)
    norm = frobenius(g)
    if norm == 0.0:
        return np.zeros((m, 0), dtype=np.complex128)
    u, values = herm_eig(g, config)
    if values[0] < -config.psd_tol * norm:
        raise NotPSD(f"matrix has eigenvalue {values[0]:.3e} below -{config.psd_tol:.1e} x {norm:.3e}")
    keep = values > config.rank_tol * norm
    return (u[:, keep] * np.sqrt(values[keep])).astype(np.complex128)


def gram(y: CMat) -> CMat:
    """Y Y^dagger, with an M x 0 input giving the M x M zero matrix."""
    return y @ dagger(y)


def basis_matrix(m: int, i: int = 0, j: int = 0) -> CMat:
    """Matrix with a single unit entry at (i, j)."""
    e = np.zeros((m, m), dtype=np.complex128)
    e[i, j] = 1.0
    return e
