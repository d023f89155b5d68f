"""Independent reference formulas used only by the tests."""

import numpy as np


def vaaler_J_hat(t):
    """Fourier transform of Vaaler's odd kernel, continuous on [-1, 1]."""
    t = float(t)
    a = abs(t)
    if a >= 1:
        return 0.0
    if t == 0:
        return 1.0
    return np.pi * t * (1 - a) / np.tan(np.pi * t) + a


def beurling_hat(t):
    """Distributional transform of F away from t = 0: J^(t)/(pi i t) + (1 - |t|)."""
    a = abs(t)
    if a >= 1:
        return 0j
    return vaaler_J_hat(t) / (np.pi * 1j * t) + (1 - a)


def pair_coefficients(k, gamma, psi, D):
    """Closed-form (g1^(k), g2^(k)) for the Beurling-Selberg interval pair."""
    l, r = gamma - psi, gamma + psi
    if k == 0:
        return 2 * psi + 1 / D, 2 * psi - 1 / D
    s = k / D
    if abs(s) >= 1:
        return 0j, 0j
    el, er = np.exp(-2j * np.pi * k * l), np.exp(-2j * np.pi * k * r)
    even = (1 - abs(s)) * (el + er)
    odd = vaaler_J_hat(s) / (np.pi * 1j * s) * (el - er)
    return (even + odd) / (2 * D), (-even + odd) / (2 * D)


def beurling_series_reference(z, K=200000):
    """Plain partial sum of the defining series, no tail correction."""
    n = np.arange(0, K + 1, dtype=float)
    s2 = (np.sin(np.pi * z) / np.pi) ** 2
    body = np.sum(1.0 / (z - n) ** 2) - np.sum(1.0 / (z + n[1:]) ** 2) + 2.0 / z
    return s2 * body
