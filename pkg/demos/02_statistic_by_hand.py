"""
The statistic on a two-point sample
===================================

With n = 2 the U-statistic has a single pair and can be checked by hand:
<U_1, U_2> = 2, K_12 = 0.75 and phi_12 = 1 at h = 1 give
I_n = 1.5, v_n^2 = 2.25 and T_n = 1.
"""
import numpy as np

from funcsig.kernels import GramSet, k_gram
from funcsig.ustat import asymptotic_pvalue, statistic, u_gram

u = np.array([1.0, 2.0])
z = np.array([0.0, 0.0])
grams = GramSet(u_gram(u), k_gram(z, "epanechnikov", 1.0), np.ones((2, 2)), 1.0, 1)
print("u_gram =\n", grams.u_gram)
print("k_gram =\n", grams.k_gram)

i_n, v_n2, t_n = statistic(grams)
print(f"I_n = {i_n}, v_n^2 = {v_n2}, T_n = {t_n}")
print("one-sided p-value =", round(asymptotic_pvalue(t_n, 0.10)[0], 4))

# move the points apart: at |Z_1 - Z_2| = h the Epanechnikov weight vanishes
# and the variance estimate is zero, so T_n is undefined
far = GramSet(grams.u_gram, k_gram(np.array([0.0, 1.0]), "epanechnikov", 1.0), np.ones((2, 2)), 1.0, 1)
try:
    statistic(far)
except ArithmeticError as exc:
    print("degenerate:", exc)
