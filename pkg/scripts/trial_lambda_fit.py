"""Lambda distribution of the coherent trial state and a Gaussian fit to it.

The exact moments and the least-squares Gaussian parameters are printed
side by side; a fit to the discrete points is what a figure reader sees.
"""
import argparse

import numpy as np
from scipy.optimize import curve_fit

from tcground import ModelParams, trial_coefficients, trial_lambda_distribution


def gaussian(x, amp, mu, sigma):
    return amp * np.exp(-0.5 * ((x - mu) / sigma) ** 2)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-atoms", type=int, default=6)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--gamma", type=float, default=-1.5)
    args = ap.parse_args()

    params = ModelParams.from_delta(args.n_atoms, args.gamma, args.delta)
    dist, mean, std = trial_lambda_distribution(trial_coefficients(params))
    keep = dist.weights > 1e-14
    x, y = dist.index[keep], dist.weights[keep]
    (amp, mu, sigma), _ = curve_fit(gaussian, x, y, p0=(y.max(), mean, std))

    print("lambda,probability")
    for lam, p in zip(x, y):
        print(f"{lam:g},{p:.12g}")
    print(f"# exact mean {mean:.6f}  std {std:.6f}")
    print(f"# fitted mu {mu:.6f}  sigma {abs(sigma):.6f}  amplitude {amp:.6f}")
    print(f"# P(lambda <= 10) = {y[x <= 10].sum():.6f}")


if __name__ == "__main__":
    main()
