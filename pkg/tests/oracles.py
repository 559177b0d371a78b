"""Slow, loop-based reference implementations used as test oracles."""
import math


def naive_stats(u, z, phi, h, kern=lambda x: 0.75 * (1 - x * x) if abs(x) < 1 else 0.0):
    """I_n and v_n^2 from explicit loops over ordered pairs (scalar u, q = 1)."""
    n = len(u)
    s1 = 0.0
    s2 = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            t = u[i] * u[j] * kern((z[i] - z[j]) / h) * phi[i][j]
            s1 += t
            s2 += t * t
    i_n = s1 / (n * (n - 1) * h)
    v_n2 = 2.0 * s2 / (n * n * (n - 1) ** 2 * h * h)
    return i_n, v_n2


def naive_tn(u, z, phi, h):
    i_n, v_n2 = naive_stats(u, z, phi, h)
    return i_n / math.sqrt(v_n2)
