"""Signal/noise subspace split of a sample covariance."""

from dataclasses import dataclass

import numpy as np

from .exceptions import CoprimeDOAError

HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class SubspaceDecomposition:
    """Eigenpairs of ``R_hat`` split into the ``D`` largest and the rest.

    Attributes
    ----------
    e_s, lambda_s : signal eigenvectors (L x D) and eigenvalues, descending.
    e_n, lambda_n : noise eigenvectors (L x (L-D)) and eigenvalues, descending.
    sigma2_hat : mean of ``lambda_n``.
    """

    e_s: np.ndarray
    lambda_s: np.ndarray
    e_n: np.ndarray
    lambda_n: np.ndarray
    sigma2_hat: float

    @property
    def num_sources(self):
        return self.e_s.shape[1]

    @property
    def size(self):
        return self.e_s.shape[0]

    def reconstruct(self):
        return ((self.e_s * self.lambda_s) @ self.e_s.conj().T
                + (self.e_n * self.lambda_n) @ self.e_n.conj().T)


def decompose(r_hat, d: int) -> SubspaceDecomposition:
    r_hat = np.asarray(r_hat)
    if r_hat.ndim != 2 or r_hat.shape[0] != r_hat.shape[1]:
        raise CoprimeDOAError("covariance must be a square matrix")
    size = r_hat.shape[0]
    if not 1 <= d < size:
        raise CoprimeDOAError(f"source count must satisfy 1 <= D < L={size}, got D={d}")
    scale = max(np.linalg.norm(r_hat), np.finfo(float).tiny)
    if np.linalg.norm(r_hat - r_hat.conj().T) > HERMITIAN_RTOL * scale:
        raise CoprimeDOAError("covariance is not Hermitian")
    w, v = np.linalg.eigh(r_hat)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    lambda_n = w[d:]
    sigma2 = float(np.sum(lambda_n) / (size - d))
    return SubspaceDecomposition(v[:, :d], w[:d], v[:, d:], lambda_n, sigma2)
