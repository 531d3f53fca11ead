#!/usr/bin/env python3
"""A.c. spectral density for the Hermite coefficients a_n = sqrt((n+1)/2).

The measure is exp(-x^2)/sqrt(pi) dx, so 1/(pi |Omega(x)|^2) has an exact
target to compare against.  Writes density_hermite.csv next to the repo root;
plots if matplotlib is importable.

usage: python3 scripts/density_hermite.py [n_trunc]
"""
import csv
import math
import sys

import numpy as np

from jacobi_jost import PowerLaw, classify
from jacobi_jost.carleman import ac_spectral_density

model = PowerLaw(gamma=2**-0.5, p=0.5, shift=1)
reg = classify(model)
n_trunc = int(sys.argv[1]) if len(sys.argv) > 1 else 4000

xs = np.linspace(-2.0, 2.0, 81)
rho = ac_spectral_density(model, xs, n_trunc=n_trunc, regime=reg)
exact = np.exp(-xs**2) / math.sqrt(math.pi)
rel = np.abs(rho - exact) / exact

print(f"n_trunc = {n_trunc}: max rel deviation from exp(-x^2)/sqrt(pi) "
      f"on [-2, 2] is {rel.max():.3e} (median {np.median(rel):.3e})")
print("the deviation scales like 1/n_trunc; try doubling it")

with open("density_hermite.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["x", "density", "exact", "rel_err"])
    for row in zip(xs, rho, exact, rel):
        w.writerow([repr(float(v)) for v in row])
print("wrote density_hermite.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    ax1.plot(xs, rho, label="1/(pi |Omega|^2) route")
    ax1.plot(xs, exact, "--", label="exp(-x^2)/sqrt(pi)")
    ax1.legend()
    ax1.set_ylabel("density")
    ax2.semilogy(xs, rel)
    ax2.set_ylabel("rel err")
    ax2.set_xlabel("x")
    fig.savefig("density_hermite.png", dpi=130)
    print("wrote density_hermite.png")
except ImportError:
    pass
