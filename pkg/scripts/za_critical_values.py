"""Simulate critical values of the intercept-break, constant-only
Zivot-Andrews statistic (no trend, no augmentation lags).

Under the unit-root null the asymptotic distribution does not depend on the
augmentation lags, so a driftless Gaussian random walk with zero lags is
enough.  For each replication the t-ratio on y_{t-1} in

    dy_t = mu + theta * 1{t > b} + gamma * y_{t-1} + e_t

is computed for every candidate break b in [trim T, (1 - trim) T] via
cumulative sums, and the minimum is kept.

    python scripts/za_critical_values.py --reps 50000 --nobs 1000
"""

import argparse

import numpy as np


def za_min_t(y: np.ndarray, trim: float = 0.15) -> float:
    n = y.size
    dy = np.diff(y)
    ylag = y[:-1]
    target = np.arange(1, n)  # dy[i] is the change into y[i + 1]
    lo, hi = int(np.ceil(trim * n)), int(np.floor((1 - trim) * n))
    breaks = np.arange(max(lo, 1), min(hi, n - 2) + 1)
    m = dy.size
    # sums over the post-break part (t > b) via reversed cumulative sums
    def tail(v):
        c = np.concatenate([np.cumsum(v[::-1])[::-1], [0.0]])
        return c[np.searchsorted(target, breaks, side="right")]

    s1, sy, syy = float(m), ylag.sum(), ylag @ ylag
    sd, sdy = dy.sum(), ylag @ dy
    nb, syb, sdb = tail(np.ones(m)), tail(ylag), tail(dy)
    k = breaks.size
    xtx = np.empty((k, 3, 3))
    xtx[:, 0, 0], xtx[:, 0, 1], xtx[:, 0, 2] = s1, nb, sy
    xtx[:, 1, 1], xtx[:, 1, 2], xtx[:, 2, 2] = nb, syb, syy
    xtx[:, 1, 0], xtx[:, 2, 0], xtx[:, 2, 1] = nb, sy, syb
    xty = np.stack([np.full(k, sd), sdb, np.full(k, sdy)], axis=1)
    inv = np.linalg.inv(xtx)
    coef = np.einsum("kij,kj->ki", inv, xty)
    rss = dy @ dy - np.einsum("ki,ki->k", coef, xty)
    s2 = rss / (m - 3)
    t = coef[:, 2] / np.sqrt(s2 * inv[:, 2, 2])
    return float(t.min())


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=50000)
    parser.add_argument("--nobs", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=20240101)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    stats = np.array([za_min_t(np.cumsum(rng.standard_normal(args.nobs))) for _ in range(args.reps)])
    for q in (0.01, 0.05, 0.10):
        print(f"{q:.2f}: {np.quantile(stats, q):.4f}")


if __name__ == "__main__":
    main()
