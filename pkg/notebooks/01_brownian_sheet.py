# coding: utf-8

# # Brownian sheets on a grid
#
# A sheet on [0,1]x[0,1] is stored as its cell increments. Each increment is
# an independent Gaussian whose variance is the cell area.

# In[1]:

import numpy as np

from yehfeynman import RngStream, constant, l2_norm_sq, make_grid, sample_function, sample_sheet
from yehfeynman.sheet import gaussian_path, process_covariance, pwz_samples

grid = make_grid(1.0, 1.0, 64, 64)
rng = RngStream(seed=1)
x = sample_sheet(grid, rng)
print("x(1, 1) =", x.value_at(1.0, 1.0))
print("node array shape:", x.node_values().shape)


# Sample ``k`` of a stream is fixed by ``(seed, stream, k)`` alone, so asking
# for it twice gives the same sheet.

# In[2]:

assert np.array_equal(sample_sheet(grid, rng, 7).increments, sample_sheet(grid, rng, 7).increments)


# # Stochastic integrals are Gaussian
#
# The integral of v against x has mean 0 and variance equal to the squared
# L2 norm of v.

# In[3]:

v = sample_function(lambda s, t: np.sin(2 * np.pi * s) * np.sin(2 * np.pi * t), grid)
vals = pwz_samples([v], rng, 20_000)[:, 0]
print("sample variance %.4f  vs  norm %.4f" % (vals.var(), l2_norm_sq(v)))


# # The process Y_h
#
# Its increments are h times the sheet increments. The covariance of two such
# processes is an integral of h1 h2 over the common lower-left rectangle.

# In[4]:

h = sample_function(lambda s, t: 1 + s * t, grid)
y = gaussian_path(h, x)
print("Y_h(1, 1) =", y.value_at(1.0, 1.0))
print("cov =", process_covariance(h, constant(1.0, grid), (0.5, 0.5), (1.0, 0.25)))
