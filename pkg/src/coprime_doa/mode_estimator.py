"""MODE for a uniform linear (sub)array, plus folding into the ambiguity interval.

The subarray is treated as a unit-spaced ULA in the variable
``phi = spacing * psi``.  MODE fits a conjugate-symmetric polynomial
``b(z) = b_0 z^D + ... + b_D`` whose unit-circle roots ``exp(1j*phi_i)``
annihilate the weighted signal subspace; the phases are then folded back to
``psi`` modulo ``2*pi/spacing``.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .array_model import CoprimeGeometry, SnapshotSet, sample_covariance
from .exceptions import CoprimeDOAError, DegreeDeficiency, SubspaceCollapse
from .subspace import SubspaceDecomposition, decompose

TWO_PI = 2.0 * np.pi
COLLAPSE_RTOL = 1e-10


@dataclass(frozen=True)
class ModeCoefficients:
    """Unit-norm, conjugate-symmetric ``b = [b_0, ..., b_D]``.

    The sign is fixed so that ``b_0`` has positive real part (or, when that
    is zero, positive imaginary part).
    """

    b: np.ndarray

    @property
    def degree(self):
        return self.b.shape[0] - 1


@dataclass(frozen=True)
class FoldedEstimate:
    spacing: int
    reps: tuple


def _symmetric_basis(d):
    """Orthonormal map from ``D+1`` reals to conjugate-symmetric vectors."""
    t = np.zeros((d + 1, d + 1), dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    col = 0
    for k in range((d + 1) // 2):
        t[k, col] = s
        t[d - k, col] = s
        t[k, col + 1] = 1j * s
        t[d - k, col + 1] = -1j * s
        col += 2
    if d % 2 == 0:
        t[d // 2, col] = 1.0
    return t


def _canonical(b):
    d = b.shape[0] - 1
    b = b / np.linalg.norm(b)
    for k in range((d + 1) // 2):
        b[d - k] = np.conj(b[k])
    if d % 2 == 0:
        b[d // 2] = b[d // 2].real
    lead = b[0]
    if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
        b = -b
    return b


def toeplitz_bh(b, size):
    """The ``(L-D) x L`` banded matrix whose rows are shifted ``[b_D ... b_0]``."""
    d = b.shape[0] - 1
    bh = np.zeros((size - d, size), dtype=complex)
    rev = b[::-1]
    for r in range(size - d):
        bh[r, r:r + d + 1] = rev
    return bh


def weighted_signal_basis(sub: SubspaceDecomposition) -> np.ndarray:
    """``E_s W^(1/2)`` with ``W = (Lambda_s - sigma2 I)^2 Lambda_s^-1``."""
    lam = sub.lambda_s
    trace = float(np.sum(lam) + np.sum(sub.lambda_n))
    excess = lam - sub.sigma2_hat
    if np.all(excess <= COLLAPSE_RTOL * max(trace, np.finfo(float).tiny)) or np.any(lam <= 0):
        raise SubspaceCollapse("subspace collapse: signal eigenvalues do not "
                               "exceed the estimated noise power")
    w_sqrt = np.abs(excess) / np.sqrt(lam)
    return sub.e_s * w_sqrt


def mode_objective(b, sub: SubspaceDecomposition) -> float:
    """``tr{Pi_B E_s W E_s^H}`` evaluated directly from the projector."""
    v = weighted_signal_basis(sub)
    big_b = toeplitz_bh(np.asarray(b, dtype=complex), sub.size).conj().T
    proj = big_b @ np.linalg.solve(big_b.conj().T @ big_b, big_b.conj().T)
    return float(np.real(np.trace(proj @ v @ v.conj().T)))


def _design_blocks(v, d):
    # g[c] @ b == B^H v[:, c]
    size = v.shape[0]
    rows = np.arange(size - d)[:, None] + d - np.arange(d + 1)[None, :]
    return np.transpose(v[rows, :], (2, 0, 1))


def mode_fit(sub: SubspaceDecomposition, d: int = None, iterations: int = 2) -> ModeCoefficients:
    """Two-step (or ``iterations``-step) MODE fit of the root polynomial.

    The first pass minimises ``||B^H V||_F^2`` with ``V = E_s W^(1/2)``; each
    later pass whitens the residual with ``(B^H B)^-1`` built from the
    previous coefficients.  Each pass is a quadratic form in ``b`` minimised
    over unit-norm conjugate-symmetric vectors.
    """
    if d is None:
        d = sub.num_sources
    size = sub.size
    if size <= d:
        raise CoprimeDOAError(f"subarray of {size} sensors cannot resolve {d} sources")
    if iterations < 1:
        raise CoprimeDOAError("iterations must be >= 1")
    v = weighted_signal_basis(sub)
    g = _design_blocks(v, d)
    t = _symmetric_basis(d)
    weight = None
    b = None
    for _ in range(iterations):
        if weight is None:
            q = np.einsum("cri,crj->ij", g.conj(), g)
        else:
            q = np.einsum("cri,rs,csj->ij", g.conj(), weight, g)
        a = np.real(t.conj().T @ q @ t)
        a = 0.5 * (a + a.T)
        _, vecs = np.linalg.eigh(a)
        b = _canonical(t @ vecs[:, 0])
        bh = toeplitz_bh(b, size)
        weight = np.linalg.inv(bh @ bh.conj().T)
    return ModeCoefficients(b)


def wrap_angle(x):
    """Wrap to ``[-pi, pi)``."""
    r = np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi
    r = np.where(r >= np.pi, -np.pi, r)
    return float(r) if np.ndim(r) == 0 else r


def roots_to_angles(coeffs) -> List[float]:
    """Angles of the roots of ``b(z)``, sorted ascending in ``[-pi, pi)``."""
    b = np.asarray(getattr(coeffs, "b", coeffs), dtype=complex)
    d = b.shape[0] - 1
    if d < 1:
        raise DegreeDeficiency("polynomial has no roots")
    if abs(b[0]) < 1e-12 * np.linalg.norm(b):
        raise DegreeDeficiency("leading coefficient b_0 is numerically zero")
    roots = polynomial_roots(b)
    return sorted(wrap_angle(np.angle(roots)).tolist())


def polynomial_roots(b) -> np.ndarray:
    """Eigenvalues of the companion matrix of ``b`` (highest degree first)."""
    b = np.asarray(b, dtype=complex)
    monic = b[1:] / b[0]
    d = monic.shape[0]
    comp = np.zeros((d, d), dtype=complex)
    comp[0, :] = -monic
    comp[np.arange(1, d), np.arange(d - 1)] = 1.0
    return np.linalg.eigvals(comp)


def fold_to_fundamental(angle, spacing: int) -> float:
    """Representative of ``angle / spacing`` modulo ``2*pi/spacing``.

    Given a unit-spaced phase ``phi`` from a subarray with step ``spacing``,
    returns the unique ``psi`` in ``[-pi, -pi + 2*pi/spacing)`` with
    ``spacing * psi == phi (mod 2*pi)``.
    """
    if spacing < 2:
        raise CoprimeDOAError(f"spacing must be >= 2, got {spacing}")
    period = TWO_PI / spacing
    rep = -np.pi + np.mod(float(angle) / spacing + np.pi, period)
    # rounding can land exactly on the excluded upper end, which aliases to -pi
    if rep >= -np.pi + period:
        rep = -np.pi
    return float(rep)


def estimate_subarray(snaps: SnapshotSet, geom: CoprimeGeometry, which: int, d: int,
                      iterations: int = 2) -> FoldedEstimate:
    """Run MODE on one subarray and fold its estimates."""
    spacing = geom.subarray_spacing(which)
    sub_snaps = snaps.rows(geom.subarray_indices(which))
    sub = decompose(sample_covariance(sub_snaps), d)
    coeffs = mode_fit(sub, d, iterations)
    reps = sorted(fold_to_fundamental(phi, spacing) for phi in roots_to_angles(coeffs))
    return FoldedEstimate(spacing, tuple(reps))
