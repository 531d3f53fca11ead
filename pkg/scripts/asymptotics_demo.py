#!/usr/bin/env python3
# Polynomial growth above the critical line: |P_n(z)| ~ C(z) a_n^{-1/2} e^{phi_n}
# with C(z) = kappa_inf |Omega(z)| / (2 sqrt(beta_inf^2 - 1)).  The rescaled
# values flatten onto the predicted constant once the remainder tail dies.
import math

from jacobi_jost import Geometric, classify
from jacobi_jost.solutions import poly_prefactor_supercritical

model = Geometric(gamma=1.0, x=2.0, beta_const=-1.1)
reg = classify(model)
z = 1j

out = poly_prefactor_supercritical(model, z, n_lo=25, n_hi=400)
pred = out["predicted"]
print(f"z = {z}, Omega = {out['omega']:.10g}, predicted prefactor {pred:.12g}")
print(f"{'n':>5} {'rescaled |P_n|':>18} {'rel dev':>12}")
for n, v in zip(out["ns"], out["measured"]):
    if n in (25, 50, 100, 200, 300, 400):
        print(f"{n:5d} {float(v):18.12f} {abs(float(v) - pred) / pred:12.3e}")
print(f"max rel dev on [25, 400]: {out['rel_max']:.3e} "
      f"(at n = 400: {out['rel_last']:.3e})")
