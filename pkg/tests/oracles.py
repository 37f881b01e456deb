"""Brute-force reference computations, written without the package's kernels."""

import numpy as np


def one_step_kernel(beta, K, mask_id, kernel):
    """q(x_t = j | x_{t-1} = i) by case analysis, entry by entry."""
    Q = np.zeros((K, K))
    for i in range(K):
        for j in range(K):
            if kernel == "absorbing":
                if i == mask_id:
                    Q[i, j] = 1.0 if j == mask_id else 0.0
                elif j == i:
                    Q[i, j] = 1 - beta
                elif j == mask_id:
                    Q[i, j] = beta
            else:
                Q[i, j] = (1 - beta) * (i == j) + beta / K
    return Q


def chained_marginal(betas, t, K, mask_id, kernel):
    """q(x_t | x_0) as the product of t one-step kernels."""
    M = np.eye(K)
    for s in range(1, t + 1):
        M = M @ one_step_kernel(betas[s], K, mask_id, kernel)
    return M


def bayes_posterior(x_t, x0_dist, t, betas, K, mask_id, kernel):
    """Normalise q(x_t | x_{t-1}) * sum_c x0_dist[c] q(x_{t-1} | x_0 = c) over all x_{t-1}.

    x_t: (L,), x0_dist: (L, K) -> (L, K).
    """
    Qt = one_step_kernel(betas[t], K, mask_id, kernel)
    prior = x0_dist @ chained_marginal(betas, t - 1, K, mask_id, kernel)
    out = np.zeros_like(x0_dist)
    for i, xt in enumerate(x_t):
        unnorm = np.array([Qt[prev, xt] * prior[i, prev] for prev in range(K)])
        out[i] = unnorm / unnorm.sum()
    return out
