"""Small numerical kernels shared by the block path and the observables."""

import numpy as np


def entropy_from_spectrum(eigenvalues: np.ndarray, slack: float = 1e-10) -> np.ndarray:
    """Von Neumann entropy in bits from eigenvalues along the last axis.

    Eigenvalues are clipped to [0, 1] (numerical noise within ``slack`` is
    expected around 0 and 1); 0 log 0 is taken as 0.
    """
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, -lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
    return terms.sum(axis=-1)


def gram_spectrum(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of A A^dagger for a stack of matrices, via the smaller Gram side."""
    rows, cols = a.shape[-2], a.shape[-1]
    if rows <= cols:
        gram = a @ np.swapaxes(a, -1, -2).conj()
    else:
        gram = np.swapaxes(a, -1, -2).conj() @ a
    return np.linalg.eigvalsh(gram)
