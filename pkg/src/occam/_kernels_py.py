"""Pure-Python/numpy versions of the hot loops in ``_kernels.pyx``.

Signatures and results match the compiled module; the compiled one just
avoids per-step interpreter and numpy call overhead on tiny matrices.
"""
import math

import numpy as np

BACKEND = "python"

_LOG_2PI = math.log(2.0 * math.pi)


def prefix_log_evidences(phi, ts, sigma, sigma_w):
    """Gaussian-linear log evidence for every prefix ``ts[:n]``, ``n = 0..N``.

    Sufficient statistics are accumulated one row at a time; each step
    factorizes ``A = Id/sigma_w^2 + Phi^T Phi/sigma^2`` from scratch.
    """
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    n_rows, m = phi.shape
    s2 = sigma * sigma
    a = np.eye(m) / (sigma_w * sigma_w)
    b = np.zeros(m)
    tt = 0.0
    const_w = -m * math.log(sigma_w)
    out = np.empty(n_rows + 1)
    out[0] = 0.0
    for i in range(n_rows):
        row = phi[i]
        t = ts[i]
        a += np.outer(row, row) / s2
        b += row * (t / s2)
        tt += t * t
        lower = np.linalg.cholesky(a)
        z = np.linalg.solve(lower, b)
        n = i + 1
        out[n] = (
            -0.5 * n * (_LOG_2PI + math.log(s2))
            + const_w
            - 0.5 * (tt / s2 - z @ z)
            - np.sum(np.log(np.diag(lower)))
        )
    return out


def coin_log_odds_path(bits, prior_log_odds):
    """Running ``ln p(H0|t_1..n) - ln p(H1|t_1..n)`` for ``n = 1..N``."""
    bits = np.asarray(bits, dtype=np.int8)
    out = np.empty(bits.size)
    lo = float(prior_log_odds)
    n = 0
    k = 0
    for i, bit in enumerate(bits):
        if bit == 0:
            lo += math.log((n + 2) / (2 * k + 2))
            k += 1
        else:
            lo += math.log((n + 2) / (2 * (n + 1 - k)))
        n += 1
        out[i] = lo
    return out
