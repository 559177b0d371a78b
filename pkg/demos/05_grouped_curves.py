"""
ANOVA and ANCOVA residuals for grouped curves
=============================================

Curves fall into groups (e.g. climate zones). Residuals subtract
leave-one-out group means; ANCOVA also removes a functional linear effect
of a covariate through K leave-one-out principal directions.
"""
import numpy as np

from funcsig.funcspace import FunctionalSample, Grid
from funcsig.procedure import bandwidth, prepare_covariates, significance_test
from funcsig.residuals import (
    GroupedFunctionalSample,
    ancova_maker,
    ancova_residuals,
    anova_residuals,
    loo_maker,
    select_ancova_k,
)

rng = np.random.default_rng(8)
grid = Grid(73)
labels = np.repeat([0, 1, 2, 3], [8, 14, 10, 8])
n = len(labels)
shift = rng.standard_normal((4, grid.m)).cumsum(axis=1) * 0.1
x = shift[labels] + rng.standard_normal((n, grid.m)).cumsum(axis=1) * 0.15
y = 0.8 * x + rng.standard_normal((n, grid.m)).cumsum(axis=1) * 0.05
ys = GroupedFunctionalSample(FunctionalSample(grid, y), labels)
xs = GroupedFunctionalSample(FunctionalSample(grid, x), labels)
cov = prepare_covariates(xs.sample, q=1)
h = bandwidth(n)

# ANOVA ignores the covariate effect, so its residuals still depend on X
u = anova_residuals(ys)
res = significance_test(u, cov.z, cov.w, h, n_boot=199, seed=2, residual_maker=loo_maker(labels))
print(f"ANOVA  residuals: T_n = {res.t_n:6.2f}  p_boot = {res.p_boot:.3f}")

k = select_ancova_k(ys, xs, [4, 6, 8, 10])
u = ancova_residuals(ys, xs, k)
res = significance_test(u, cov.z, cov.w, h, n_boot=199, seed=2,
                        residual_maker=ancova_maker(ys, xs, k))
print(f"ANCOVA residuals (K = {k}): T_n = {res.t_n:6.2f}  p_boot = {res.p_boot:.3f}")
