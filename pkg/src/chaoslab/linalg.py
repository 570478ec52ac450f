"""Dense numerical kernel for small square matrices.

Everything downstream (witness search, certificates, stability scans) reduces
to a handful of primitives on d x d arrays: the largest and smallest singular
values, the spectral radius, symmetric eigenvalues, and products of long
matrix words tracked in log scale so that growth like 2**(+-40) never
overflows.  Matrices are plain float64 numpy arrays; all norms are Euclidean
(spectral norm for operators).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NonConvergenceError

# Absolute tolerance for scalar threshold comparisons throughout the package.
ABS_TOL = 1e-12

# A matrix counts as singular when co_norm falls below this multiple of op_norm.
SINGULARITY_RTOL = 1e-12

# Dimension cap for the eigenvalue-based routines.
MAX_EIG_DIM = 8

# Renormalization band for LogScaledMatrix units.
_BAND_LO = 0.5
_BAND_HI = 2.0


def as_matrix(a) -> np.ndarray:
    """Validate and coerce ``a`` to a finite square float64 array."""
    try:
        arr = np.asarray(a, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"cannot interpret input as a matrix: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError(f"expected a square matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("matrix entries must be finite")
    return arr


def _singular_extremes(a: np.ndarray) -> tuple[float, float]:
    """Largest and smallest singular values of a validated square array.

    The 2x2 case is closed-form: the Gram matrix A^T A has eigenvalue
    lam_max = (t + sqrt((g11-g22)^2 + 4 g12^2)) / 2 with t = trace, computed
    without cancellation, and sigma_min = |det A| / sigma_max, which avoids
    subtracting nearly equal Gram eigenvalues.
    """
    d = a.shape[0]
    if d == 1:
        v = abs(float(a[0, 0]))
        return v, v
    if d == 2:
        g11 = a[0, 0] * a[0, 0] + a[1, 0] * a[1, 0]
        g22 = a[0, 1] * a[0, 1] + a[1, 1] * a[1, 1]
        g12 = a[0, 0] * a[0, 1] + a[1, 0] * a[1, 1]
        diff = g11 - g22
        disc = math.sqrt(max(diff * diff + 4.0 * g12 * g12, 0.0))
        lam_max = (g11 + g22 + disc) / 2.0
        smax = math.sqrt(max(lam_max, 0.0))
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        smin = abs(det) / smax if smax > 0.0 else 0.0
        return smax, min(smin, smax)
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[0]), float(s[-1])


def op_norm(a) -> float:
    """Largest singular value: sqrt of the top eigenvalue of A^T A.

    This is the maximum of |A x| over unit vectors x, so it is the tightest
    uniform growth factor of the linear map.
    """
    return _singular_extremes(as_matrix(a))[0]


def co_norm(a) -> float:
    """Smallest singular value: the minimum of |A x| over unit vectors x.

    Zero exactly when A is singular.  For nonsingular A it equals
    1 / op_norm(A^{-1}), which makes it the tightest uniform expansion
    factor from below.
    """
    return _singular_extremes(as_matrix(a))[1]


@dataclass(frozen=True)
class Spectrum:
    """Spectral radius of a matrix plus convergence diagnostics.

    ``residual`` is a scaled eigen-equation defect; it is 0.0 for the
    closed-form low-dimensional paths and tiny (machine level) whenever the
    iterative path converged, so ``radius`` is trustworthy when
    ``residual`` is small.
    """

    radius: float
    roots_found: int
    residual: float


def spectral_radius(a) -> Spectrum:
    """Maximum eigenvalue modulus of a real d x d matrix, d <= 8.

    d = 1 and d = 2 use exact closed forms (for d = 2 the max root modulus
    of lambda^2 - tr lambda + det is (|tr| + sqrt(max(tr^2 - 4 det, 0))) / 2
    for real spectra and sqrt(det) for complex pairs).  Larger d uses a
    balanced QR eigensolver and reports the eigenpair defect as residual.
    """
    arr = as_matrix(a)
    d = arr.shape[0]
    if d > MAX_EIG_DIM:
        raise InvalidInputError(
            f"spectral_radius supports dimension <= {MAX_EIG_DIM}, got {d}"
        )
    if d == 1:
        return Spectrum(radius=abs(float(arr[0, 0])), roots_found=1, residual=0.0)
    if d == 2:
        tr = float(arr[0, 0] + arr[1, 1])
        det = float(arr[0, 0] * arr[1, 1] - arr[0, 1] * arr[1, 0])
        disc = tr * tr - 4.0 * det
        if disc >= 0.0:
            radius = (abs(tr) + math.sqrt(disc)) / 2.0
        else:
            # Complex conjugate pair: |lambda|^2 = det > 0.
            radius = math.sqrt(det)
        return Spectrum(radius=radius, roots_found=2, residual=0.0)
    try:
        w, v = np.linalg.eig(arr)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"eigensolver failed: {exc}") from exc
    defect = arr.astype(complex) @ v - v * w
    scale = max(1.0, float(np.linalg.norm(arr)))
    residual = float(np.linalg.norm(defect)) / scale
    return Spectrum(radius=float(np.max(np.abs(w))), roots_found=d, residual=residual)


def sym_eigs(g) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi.

    Two-sided Givens rotations zero one off-diagonal pair at a time; sweeps
    repeat until the off-diagonal mass is at machine level.  Jacobi handles
    repeated eigenvalues exactly (rotations are orthogonal), which is why it
    backs the Gram-matrix cross-checks in the tests.
    """
    arr = as_matrix(g)
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > 1e-12 * scale:
        raise InvalidInputError("sym_eigs expects a symmetric matrix")
    a = (arr + arr.T) / 2.0
    d = a.shape[0]
    if d == 1:
        return np.array([float(a[0, 0])])
    frob = max(1.0, float(np.linalg.norm(a)))
    for _ in range(60):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                off = max(off, abs(float(a[p, q])))
        if off <= 1e-15 * frob:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = float(a[p, q])
                if abs(apq) <= 1e-18 * frob:
                    continue
                theta = (float(a[q, q]) - float(a[p, p])) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(d)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    else:
        raise NonConvergenceError("Jacobi sweeps did not converge", residual=off)
    return np.sort(np.diag(a))


@dataclass(frozen=True)
class LogScaledMatrix:
    """A matrix stored as ``exp(log_scale) * unit`` with op_norm(unit) in [0.5, 2].

    Long products of contracting or expanding factors stay representable:
    each left-multiplication renormalizes the unit part back into the band
    and accumulates the norm into ``log_scale``.
    """

    unit: np.ndarray
    log_scale: float

    def __post_init__(self):
        self.unit.setflags(write=False)

    @classmethod
    def identity(cls, dim: int) -> "LogScaledMatrix":
        if dim < 1:
            raise InvalidInputError("dimension must be at least 1")
        return cls(unit=np.eye(dim), log_scale=0.0)

    @classmethod
    def from_matrix(cls, a) -> "LogScaledMatrix":
        arr = as_matrix(a).copy()
        nu = op_norm(arr)
        if nu == 0.0:
            raise InvalidInputError("the zero matrix has no log-scaled representation")
        return cls(unit=arr / nu, log_scale=math.log(nu))

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    def left_multiply(self, a: np.ndarray) -> "LogScaledMatrix":
        """Return the log-scaled product ``a @ self``."""
        raw = a @ self.unit
        nu = op_norm(raw)
        if nu == 0.0:
            raise InvalidInputError("product collapsed to the zero matrix")
        if _BAND_LO <= nu <= _BAND_HI:
            return LogScaledMatrix(unit=raw, log_scale=self.log_scale)
        return LogScaledMatrix(unit=raw / nu, log_scale=self.log_scale + math.log(nu))

    @property
    def log_op_norm(self) -> float:
        return self.log_scale + math.log(op_norm(self.unit))

    @property
    def log_co_norm(self) -> float:
        co = co_norm(self.unit)
        if co == 0.0:
            return float("-inf")
        return self.log_scale + math.log(co)

    def dense(self) -> np.ndarray:
        """Materialize the plain matrix; may overflow for extreme log_scale."""
        return math.exp(self.log_scale) * self.unit


def word_product(generators, word) -> LogScaledMatrix:
    """Log-scaled product of generators along a word of 1-based labels.

    The rightmost factor corresponds to the first symbol, matching the
    convention that the symbol applied at time 1 acts on the state first:
    word (w1, ..., wn) yields S_{wn} ... S_{w1}.  The empty word gives the
    identity with log_scale 0.
    """
    gens = [as_matrix(g) for g in generators]
    if not gens:
        raise InvalidInputError("need at least one generator")
    d = gens[0].shape[0]
    for g in gens:
        if g.shape[0] != d:
            raise InvalidInputError("generators must share one dimension")
    prod = LogScaledMatrix.identity(d)
    for sym in word:
        label = int(sym)
        if not 1 <= label <= len(gens):
            raise InvalidInputError(
                f"word symbol {label} outside alphabet 1..{len(gens)}"
            )
        prod = prod.left_multiply(gens[label - 1])
    return prod
