"""Sign classification of a (1,1)x(1,1) curvature tensor.

The object classified is the real biquadratic ``q(xi, nu) =
Omega[i, j, k, l] xi_i conj(xi_j) nu_k conj(nu_l)`` over pairs of unit
vectors.  Freezing one argument leaves a Hermitian eigenvalue problem, so
the extremes are located by alternating exact eigen-minimization (resp.
maximization) from many random starts; witnesses are returned and
re-certified by direct evaluation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .invariant import check_cplx
from .tensors import CurvatureTensor

#: verdict tolerance as a fraction of the tensor magnitude
VERDICT_RTOL = 1e-7
DEFAULT_STARTS = 64
MAX_ALTERNATIONS = 500


class Verdict(enum.Enum):
    FLAT = "flat"
    NON_NEGATIVE = "non_negative"
    NON_POSITIVE = "non_positive"
    INDEFINITE = "indefinite"
    INDETERMINATE = "indeterminate"

    @property
    def is_nonnegative(self) -> bool:
        """Flat curvature counts as (trivially) non-negative."""
        return self in (Verdict.FLAT, Verdict.NON_NEGATIVE)

    @property
    def is_nonpositive(self) -> bool:
        return self in (Verdict.FLAT, Verdict.NON_POSITIVE)


class CplxViolationError(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            f"curvature does not satisfy the pure-type vanishing condition "
            f"(violation {report.max_violation:.3e} at {report.witness})")


@dataclass(frozen=True)
class SignClassification:
    verdict: Verdict
    min_value: float
    max_value: float
    min_witness: tuple[np.ndarray, np.ndarray]
    max_witness: tuple[np.ndarray, np.ndarray]
    tolerance: float
    magnitude: float
    stationary: bool


def biquadratic(block: np.ndarray, xi: np.ndarray, nu: np.ndarray) -> float:
    val = np.einsum("ijkl,i,j,k,l->", block, xi, np.conj(xi), nu, np.conj(nu))
    if abs(val.imag) > 1e-9 * (1.0 + abs(val)):
        raise AssertionError(f"biquadratic value is not real: {val!r}")
    return float(val.real)


def _partial_matrix(block: np.ndarray, vec: np.ndarray, frozen: str) -> np.ndarray:
    """Hermitian matrix left after freezing one argument of the biquadratic.

    The free slot pairs as ``sum_ij x_i A[i, j] conj(x_j)``, which is the
    standard Hermitian form of ``A`` transposed; the transpose is applied
    here so callers can feed the result straight to an eigensolver.
    """
    if frozen == "nu":
        A = np.einsum("ijkl,k,l->ij", block, vec, np.conj(vec))
    else:
        A = np.einsum("ijkl,i,j->kl", block, vec, np.conj(vec))
    defect = float(np.max(np.abs(A - A.conj().T)))
    if defect > 1e-10 * (1.0 + float(np.max(np.abs(A)))):
        raise AssertionError(f"partial matrix not Hermitian (defect {defect:.2e})")
    return 0.5 * (A + A.conj().T).T


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _alternate(block: np.ndarray, xi: np.ndarray, nu: np.ndarray,
               minimize: bool) -> tuple[float, np.ndarray, np.ndarray, bool]:
    """Alternating eigen-iteration; each half step is an exact optimum, so
    the objective is monotone.  Returns (value, xi, nu, stationary)."""
    pick = 0 if minimize else -1
    value = biquadratic(block, xi, nu)
    for _ in range(MAX_ALTERNATIONS):
        A = _partial_matrix(block, nu, frozen="nu")
        _, vecs = np.linalg.eigh(A)
        xi = vecs[:, pick]
        B = _partial_matrix(block, xi, frozen="xi")
        vals, vecs = np.linalg.eigh(B)
        nu = vecs[:, pick]
        new_value = float(vals[pick])
        slack = 1e-12 * (1.0 + abs(value))
        if minimize and new_value > value + slack:
            raise AssertionError("alternating minimization increased the objective")
        if not minimize and new_value < value - slack:
            raise AssertionError("alternating maximization decreased the objective")
        if abs(new_value - value) <= 1e-13 * (1.0 + abs(new_value)):
            return new_value, xi, nu, True
        value = new_value
    return value, xi, nu, False


def classify(omega: CurvatureTensor | np.ndarray,
             starts: int = DEFAULT_STARTS,
             seed: int = 0,
             rtol: float = VERDICT_RTOL) -> SignClassification:
    """Classify the sign of the bisectional biquadratic of a curvature tensor.

    ``omega`` is either a full-frame :class:`CurvatureTensor` (its pure-type
    components are then required to vanish; otherwise the call refuses) or a
    raw mixed block of shape (n, n, n, n).
    """
    if isinstance(omega, CurvatureTensor):
        report = check_cplx(omega)
        if not report.satisfied:
            raise CplxViolationError(report)
        block = omega.mixed_block()
    else:
        block = np.asarray(omega, dtype=complex)
        if block.ndim != 4 or len(set(block.shape)) != 1:
            raise ValueError("mixed block must be an (n, n, n, n) array")
    n = block.shape[0]
    magnitude = float(np.max(np.abs(block)))
    tol = rtol * magnitude
    rng = np.random.default_rng(seed)

    if magnitude <= 0.0 or magnitude <= rtol:
        zero = np.zeros(n, dtype=complex)
        return SignClassification(Verdict.FLAT, 0.0, 0.0, (zero, zero),
                                  (zero, zero), tol, magnitude, True)

    best_min = np.inf
    best_max = -np.inf
    min_wit = max_wit = None
    stationary = True
    for _ in range(starts):
        xi0, nu0 = _random_unit(rng, n), _random_unit(rng, n)
        val, xi, nu, ok = _alternate(block, xi0, nu0, minimize=True)
        stationary &= ok
        if val < best_min:
            best_min, min_wit = val, (xi, nu)
        val, xi, nu, ok = _alternate(block, xi0, nu0, minimize=False)
        stationary &= ok
        if val > best_max:
            best_max, max_wit = val, (xi, nu)

    # certify the extremes at the returned witnesses
    for val, wit in ((best_min, min_wit), (best_max, max_wit)):
        recheck = biquadratic(block, *wit)
        if abs(recheck - val) > 1e-10 * (1.0 + abs(val)):
            raise AssertionError("witness does not reproduce its extreme value")

    if best_min < -tol and best_max > tol:
        verdict = Verdict.INDEFINITE
    elif not stationary:
        verdict = Verdict.INDETERMINATE
    elif best_min >= -tol and best_max > tol:
        verdict = Verdict.NON_NEGATIVE
    elif best_max <= tol and best_min < -tol:
        verdict = Verdict.NON_POSITIVE
    else:
        # nonzero tensor whose bisectional diagonal vanishes identically
        verdict = Verdict.INDETERMINATE
    return SignClassification(verdict, float(best_min), float(best_max),
                              min_wit, max_wit, tol, magnitude, stationary)


def gamma_threshold(n: int) -> float:
    """Largest metric ratio keeping the Hopf family non-negative: 0 for
    surfaces, -1/2 from complex dimension three on."""
    if n < 2:
        raise ValueError(f"complex dimension must be >= 2, got {n}")
    return 0.0 if n == 2 else -0.5
