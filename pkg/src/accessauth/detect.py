"""Oracle least-squares symbol recovery and codebook extraction at the AP."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import solve_triangular

from .errors import SupportTooLarge

ERASURE_EPS = 1e-9


def ls_detect(y, G, support) -> np.ndarray:
    """Minimum-norm LS estimate restricted to ``support``; zero elsewhere.

    ``y`` may be ``(N,)`` or ``(N, M)``; the columns of a 2-D ``y`` share one
    factorisation and the estimate is ``(K,)`` or ``(K, M)`` accordingly.

    Full-column-rank supports go through a thin QR factorisation. Supports
    larger than the number of resources raise a :class:`SupportTooLarge`
    warning and fall back to the SVD-based minimum-norm solution.
    """
    y = np.asarray(y, dtype=np.complex128)
    G = np.asarray(G, dtype=np.complex128)
    support = np.asarray(support, dtype=np.intp).ravel()
    x_hat = np.zeros((G.shape[1],) + y.shape[1:], dtype=np.complex128)
    if support.size == 0:
        return x_hat
    A = G[:, support]
    if support.size > G.shape[0]:
        warnings.warn(f"{support.size} transmitters on {G.shape[0]} resources", SupportTooLarge, stacklevel=2)
        x_hat[support] = np.linalg.lstsq(A, y, rcond=None)[0]
        return x_hat
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= diag.max() * A.shape[0] * np.finfo(float).eps:
        # rank deficient: QR back-substitution is unstable
        x_hat[support] = np.linalg.lstsq(A, y, rcond=None)[0]
        return x_hat
    x_hat[support] = solve_triangular(R, Q.conj().T @ y)
    return x_hat


def perturb_csi(H, error_var: float, rng: np.random.Generator) -> np.ndarray:
    """Imperfect CSI: each entry gets an independent relative error of variance ``error_var``."""
    H = np.asarray(H, dtype=np.complex128)
    if error_var <= 0:
        return H.copy()
    err = np.sqrt(error_var / 2.0) * (rng.standard_normal(H.shape) + 1j * rng.standard_normal(H.shape))
    return H * (1.0 + err)


def extract_codebook(G, H, eps: float = ERASURE_EPS) -> np.ndarray:
    """Entrywise ``G / H``; entries with ``|H| <= eps`` become NaN erasures."""
    G = np.asarray(G, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    if G.shape != H.shape:
        raise ValueError(f"G {G.shape} and H {H.shape} differ in shape")
    out = np.full(G.shape, np.nan + 1j * np.nan, dtype=np.complex128)
    ok = np.abs(H) > eps
    out[ok] = G[ok] / H[ok]
    return out


def erasure_mask(extracted) -> np.ndarray:
    return np.isnan(np.asarray(extracted).real)
