"""Pure NumPy implementation of the hot kernels.

Used when the compiled extension is unavailable or LYRICVALUES_PURE is set.
Semantics match `_ckernels` exactly; see tests/test_kernels.py for the
cross-backend equivalence checks.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, logsumexp


def _log_binom_row(m: int) -> np.ndarray:
    ls = np.arange(m + 1)
    return gammaln(m + 1) - gammaln(ls + 1) - gammaln(m - ls + 1)


def rho_many(ranks) -> np.ndarray:
    """Per-row minimum binomial-tail score of normalized ranks.

    Each row holds m normalized ranks in (0, 1]. For the sorted row
    r(1) <= ... <= r(m) and each k, the tail

        beta_k = sum_{l=k}^{m} C(m, l) r(k)^l (1 - r(k))^(m-l)

    is evaluated with log-space terms; the row's score is min_k beta_k.
    """
    R = np.sort(np.asarray(ranks, dtype=float), axis=1)
    n_rows, m = R.shape
    log_c = _log_binom_row(m)
    with np.errstate(divide="ignore"):
        log_r = np.log(R)
        log_1mr = np.log1p(-np.minimum(R, 1.0 - 1e-16))
    betas = np.empty_like(R)
    for k in range(1, m + 1):
        ls = np.arange(k, m + 1)
        terms = (
            log_c[ls][None, :]
            + ls[None, :] * log_r[:, k - 1][:, None]
            + (m - ls)[None, :] * log_1mr[:, k - 1][:, None]
        )
        betas[:, k - 1] = np.exp(logsumexp(terms, axis=1))
    np.minimum(betas, 1.0, out=betas)
    betas[R >= 1.0] = 1.0
    return betas.min(axis=1)


def tau_counts(x, y) -> tuple[int, int, int, int]:
    """Concordant/discordant and per-side tied pair counts over all i < j."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    n = xv.shape[0]
    iu = np.triu_indices(n, 1)
    sx = np.sign(xv[:, None] - xv[None, :])[iu]
    sy = np.sign(yv[:, None] - yv[None, :])[iu]
    prod = sx * sy
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    ties_x = int(np.count_nonzero(sx == 0))
    ties_y = int(np.count_nonzero(sy == 0))
    return concordant, discordant, ties_x, ties_y
