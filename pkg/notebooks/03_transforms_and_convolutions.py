# coding: utf-8

# # Transforms and convolution products
#
# The transform reweights each atom by a phase. The convolution product pairs
# atoms (u + v) / sqrt(2) with cross-kernel phases. Both act on the measure,
# so identities between them can be compared to rounding error.

# In[1]:

import numpy as np

from yehfeynman import RngStream, combine_kernels, gcp, gfyft, make_grid, preset, random_functional
from yehfeynman.checks import check_relationship_I, check_relationship_II, y_samples

grid = make_grid(1.0, 1.0, 64, 64)
gen = np.random.default_rng(1)
F = random_functional(grid, gen, n_atoms=3)
G = random_functional(grid, gen, n_atoms=2)
k1, k2, h = preset("k1k2-pair", grid)
print("max |h^2 - k1 k2| =", np.max(np.abs(h.values**2 - k1.values * k2.values)))


# The transform keeps total variation and is undone by flipping the sign of q.

# In[2]:

T = gfyft(F, h, 1.5)
print(T.measure.total_variation, F.measure.total_variation)
print(np.max(np.abs(gfyft(T, h, -1.5).weights - F.weights)))

conv = gcp(F, G, k1, k2, 1.5)
print(len(conv), "atoms in the convolution")


# # Checking the relationships at sampled paths

# In[3]:

ys = y_samples(grid, RngStream(5), 10)
for check in (check_relationship_I, check_relationship_II):
    print(check(F, G, h, k1, k2, 1.5, ys).summary())


# A tiny phase error on one weight is enough to fail the comparison.

# In[4]:

print(check_relationship_I(F, G, h, k1, k2, 1.5, ys, perturb=(0, 1e-6)).summary())
