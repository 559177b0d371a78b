"""
Principal components of Wiener paths
====================================

Curves live on a uniform grid over [0, 1] and inner products use the
trapezoid rule. The Wiener process has known eigenpairs, which makes it a
good first check of the FPC machinery.
"""

import numpy as np

from funcsig.basis import fpca, split_first_component
from funcsig.funcspace import FunctionalSample, Grid, inner_product
from funcsig.simulate import eigfun_e, eigval_lambda, wiener_paths

grid = Grid(201)
rng = np.random.default_rng(1)
x = FunctionalSample(grid, wiener_paths(grid, rng, 2000))

# estimated eigenvalues against 1 / ((k - 1/2)^2 pi^2)
basis = fpca(x, 4)
for k, theta in enumerate(basis.eigenvalues, 1):
    print(f"theta_{k} = {theta:.4f}   lambda_{k} = {eigval_lambda(k):.4f}")

# eigenfunctions are orthonormal under the trapezoid inner product
phi = basis.eigenfunctions
print("<phi_1, phi_1> =", round(inner_product(phi[0], phi[0]), 12))
print("<phi_1, phi_2> =", round(inner_product(phi[0], phi[1]), 12))
print("<phi_1, e_1>   =", round(inner_product(phi[0], grid.evaluate(lambda t: eigfun_e(t, 1))), 5))

# the test smooths over the first score Z and compares the remainder W
z, w = split_first_component(x, basis)
print("mean Z^2 =", round(float(np.mean(z**2)), 4), " close to theta_1 =", round(basis.eigenvalues[0], 4))
print("remainder energy share =",
      round(float(np.mean((w.data**2) @ grid.weights)) / float(np.mean((x.data**2) @ grid.weights)), 3))
