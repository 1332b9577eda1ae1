# coding: utf-8

# # Closed forms and Monte Carlo
#
# A functional F(x) = sum_j c_j exp(i <u_j, x>) has the scaled expectation
# sum_j c_j exp(-||u_j h||^2 / (2 lam)) for lam > 0. At lam = -i q the same
# sum becomes a sum of unit-modulus phases.

# In[1]:

import numpy as np

from yehfeynman import (
    RngStream,
    closed_form_real_lambda,
    combine_kernels,
    feynman_closed_form,
    iterated_closed_form,
    make_grid,
    preset,
    random_functional,
    yeh_wiener_mc,
)
from yehfeynman.feynman import alpha_n, iterated_q_closed_form, running_estimates, yeh_wiener_samples

grid = make_grid(1.0, 1.0, 32, 32)
F = random_functional(grid, np.random.default_rng(0), n_atoms=3)
h = combine_kernels(preset("H4", grid))
print(F)


# In[2]:

for lam in (0.5, 1.0, 2.0):
    est = yeh_wiener_mc(F, h, lam, 20_000, RngStream(3))
    exact = closed_form_real_lambda(F, h, lam)
    print(f"lam={lam}: MC {est.mean:.4f} +/- ({est.se_re:.4f}, {est.se_im:.4f})   exact {exact:.4f}")

print("Feynman q=1:", feynman_closed_form(F, h, 1.0))


# Running estimates shrink at the usual n^(-1/2) rate.

# In[3]:

vals = yeh_wiener_samples([(F, h, 1.0)], 8192, RngStream(3))[:, 0]
for est in running_estimates(vals, seed=3)[::3]:
    print(est.n, round(est.se_re, 4))


# # Iterated integrals
#
# Integrating over several independent processes with kernels H is the same
# as one integral with the combined kernel s(H). Iterating in q instead gives
# one integral at 1 / (1/q_1 + ... + 1/q_n).

# In[4]:

H = preset("H4", grid)
print(abs(iterated_closed_form(F, H, 0.7) - feynman_closed_form(F, combine_kernels(H), 0.7)))
qs = (3.0, -6.0, 2.0)
print(alpha_n(qs), abs(iterated_q_closed_form(F, h, qs) - feynman_closed_form(F, h, alpha_n(qs))))
