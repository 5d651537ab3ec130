"""Monte-Carlo distribution of the held-out PCC reachable on synthetic tables.

Mirrors the synthetic generator: latent u_a, u_v ~ U[0, 1] mapped onto the
ambiqual and vmaf ranges, labels from the fixed fusion model plus Gaussian
noise, clamped to [1, 5]. For each replicate an ordinary least-squares fit
on an 80% split is scored on the remaining 20%. The printed quantiles bound
what a correct linear learner can achieve, independent of the Rust code.
"""

import argparse

import numpy as np


def table(rng, n, noise):
    qa = 0.3 + 0.65 * rng.random(n)
    qv = 20.0 + 78.0 * rng.random(n)
    clean = 1.0 + qa + 0.015 * qv + 0.015 * qa * qv
    mos = np.clip(clean + rng.normal(0.0, noise, n), 1.0, 5.0)
    return np.column_stack([np.ones(n), qa, qv, qa * qv]), mos, clean


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--rows", type=int, default=40)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--replicates", type=int, default=20000)
    p.add_argument("--seed", type=int, default=1)
    a = p.parse_args()

    rng = np.random.default_rng(a.seed)
    n_train = int(np.ceil(0.8 * a.rows))
    pcc = np.empty(a.replicates)
    rmse = np.empty(a.replicates)
    for r in range(a.replicates):
        x, y, _ = table(rng, a.rows, a.noise)
        idx = rng.permutation(a.rows)
        tr, te = idx[:n_train], idx[n_train:]
        coef, *_ = np.linalg.lstsq(x[tr], y[tr], rcond=None)
        pred = x[te] @ coef
        pcc[r] = np.corrcoef(pred, y[te])[0, 1]
        rmse[r] = np.sqrt(np.mean((pred - y[te]) ** 2))

    _, y, clean = table(rng, 1_000_000, a.noise)
    print(f"rows={a.rows} noise={a.noise} replicates={a.replicates}")
    print(f"population PCC(clean, label) = {np.corrcoef(clean, y)[0, 1]:.4f}")
    for q in (0.01, 0.05, 0.5):
        print(f"held-out PCC q{q:<4} = {np.quantile(pcc, q):.4f}")
    print(f"P(held-out PCC < 0.9) = {np.mean(pcc < 0.9):.4f}")
    print(f"held-out RMSE median = {np.median(rmse):.4f}")


if __name__ == "__main__":
    main()
