"""Complex-baseband numerics shared by every other module.

Small, pure helpers: the windowed-exponential (Dirichlet) kernel that
governs per-tap attenuation and inter-carrier leakage, Bessel J0 for the
isotropic-scattering time correlation, DFT/IDFT with the simulator's
normalization convention, and the two dense solves used by tap separation
and Wiener filtering.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = [
    "IdentifiabilityError",
    "dirichlet_kernel",
    "bessel_j0",
    "dft",
    "idft",
    "dft_direct",
    "idft_direct",
    "pseudo_inverse",
    "regularized_hermitian_solve",
]

# |sin(pi*k/N)| below this means k is (numerically) a multiple of N and the
# closed form must be replaced by its limit.
_SINGULARITY_EPS = 1e-12

# cond(A^H A) above this is treated as rank deficiency in pseudo_inverse.
_COND_LIMIT = 1e12


class IdentifiabilityError(ValueError):
    """A linear system is too ill-conditioned to separate its unknowns."""


def dirichlet_kernel(k, n_fft: int):
    """Windowed exponential sum G(k) = sum_{n=0}^{N-1} exp(-j*2*pi*k*n/N).

    Closed form ``exp(-j*pi*k*(N-1)/N) * sin(pi*k)/sin(pi*k/N)``, with the
    removable singularity at k = 0 (mod N) evaluated via its limit so no
    catastrophic cancellation occurs near integer multiples of N.  The
    function is periodic in ``k`` with period N and ``|G(k)| <= N`` with
    equality exactly at the multiples of N.

    Accepts scalar or array ``k`` (any real offset, fractional values
    included); returns complex with the same shape.
    """
    if n_fft < 1:
        raise ValueError("n_fft must be >= 1")
    k = np.asarray(k, dtype=np.float64)
    n = float(n_fft)

    denom = np.sin(np.pi * k / n)
    near_multiple = np.abs(denom) < _SINGULARITY_EPS

    # Regular branch.  Where the denominator vanishes, substitute 1 to keep
    # the division finite; those entries are overwritten below.
    safe_denom = np.where(near_multiple, 1.0, denom)
    phase = np.exp(-1j * np.pi * k * (n - 1.0) / n)
    values = phase * np.sin(np.pi * k) / safe_denom

    if np.any(near_multiple):
        # Limit at k -> m*N: reduce to the centered remainder k' = k - m*N
        # (|k'| tiny) where the limit is N * exp(-j*pi*k'*(N-1)/N) -> N.
        k_res = k - n * np.round(k / n)
        limit = n * np.exp(-1j * np.pi * k_res * (n - 1.0) / n)
        values = np.where(near_multiple, limit, values)

    if values.ndim == 0:
        return complex(values)
    return values


def bessel_j0(x):
    """Bessel function of the first kind, order zero (scalar or array)."""
    out = special.j0(x)
    return float(out) if np.ndim(out) == 0 else out


def dft(v: np.ndarray) -> np.ndarray:
    """Forward DFT with kernel exp(-j*2*pi*k*n/N) and no scaling."""
    return np.fft.fft(np.asarray(v, dtype=np.complex128))


def idft(v: np.ndarray) -> np.ndarray:
    """Inverse DFT including the 1/N factor, so idft(dft(v)) == v."""
    return np.fft.ifft(np.asarray(v, dtype=np.complex128))


def dft_direct(v: np.ndarray) -> np.ndarray:
    """O(N^2) forward DFT by explicit summation (cross-check oracle)."""
    v = np.asarray(v, dtype=np.complex128)
    n = v.size
    idx = np.arange(n)
    kernel = np.exp(-2j * np.pi * np.outer(idx, idx) / n)
    return kernel @ v


def idft_direct(v: np.ndarray) -> np.ndarray:
    """O(N^2) inverse DFT by explicit summation, with the 1/N factor."""
    v = np.asarray(v, dtype=np.complex128)
    n = v.size
    idx = np.arange(n)
    kernel = np.exp(2j * np.pi * np.outer(idx, idx) / n)
    return (kernel @ v) / n


def pseudo_inverse(a: np.ndarray) -> np.ndarray:
    """Left pseudo-inverse (A^H A)^{-1} A^H of a tall matrix.

    Computed through the normal equations with an explicit inverse of the
    small Gram matrix (the column count is 1 or 2 in practice).  Raises
    :class:`IdentifiabilityError` when the columns are (nearly) linearly
    dependent, which for the delay basis means aliased or equal tap delays.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    m, q = a.shape
    if m < q:
        raise ValueError(f"matrix must be tall, got {m}x{q}")

    gram = a.conj().T @ a
    if not np.all(np.isfinite(gram)):
        raise ValueError("non-finite entries in matrix")

    if np.linalg.cond(gram) > _COND_LIMIT:
        raise IdentifiabilityError(
            f"columns nearly dependent (cond(A^H A) > {_COND_LIMIT:g}); "
            "tap delays equal or aliased"
        )

    if q == 1:
        gram_inv = np.array([[1.0 / gram[0, 0]]])
    elif q == 2:
        det = gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0]
        gram_inv = (
            np.array([[gram[1, 1], -gram[0, 1]], [-gram[1, 0], gram[0, 0]]]) / det
        )
    else:
        gram_inv = np.linalg.inv(gram)
    return gram_inv @ a.conj().T


def regularized_hermitian_solve(
    r: np.ndarray, load: float, b: np.ndarray
) -> np.ndarray:
    """Solve (R + load*I) X = B for Hermitian PSD R and load >= 0."""
    r = np.asarray(r, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("R must be square")
    if load < 0:
        raise ValueError("load must be >= 0")
    scale = max(np.abs(r).max(), 1.0)
    if np.abs(r - r.conj().T).max() > 1e-10 * scale:
        raise ValueError("R is not Hermitian")

    system = r + load * np.eye(r.shape[0])
    if load == 0.0 and np.linalg.cond(system) > _COND_LIMIT:
        raise IdentifiabilityError(
            "singular correlation system with zero diagonal loading"
        )
    try:
        return np.linalg.solve(system, b)
    except np.linalg.LinAlgError as exc:
        raise IdentifiabilityError(
            "singular correlation system with zero diagonal loading"
        ) from exc
