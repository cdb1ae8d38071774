"""First-kind Bessel values by normalized backward recurrence.

The downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1} is stable, so a trial
solution started far above the highest wanted order converges onto the true
ratios; the overall scale is fixed with the identity J_0 + 2 sum J_{2m} = 1.
Needed orders here are modest (the kick couplings die super-exponentially
beyond order phi_d), so no asymptotic branch is required.
"""

from __future__ import annotations

import math

import numpy as np

# powers of (-i) by exponent mod 4; exact, unlike complex pow
_MINUS_I_POW = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)

_RESCALE = 1e250


def bessel_j_row(order_max: int, x: float) -> np.ndarray:
    """J_0(x) .. J_order_max(x) for x >= 0."""
    if order_max < 0:
        raise ValueError("order_max must be non-negative")
    if x < 0:
        raise ValueError("x must be non-negative")
    out = np.zeros(order_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out

    start = max(order_max, int(math.ceil(x))) + 20 + int(4.0 * math.sqrt(max(order_max, x)))
    j_above = 0.0
    j_here = 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        j_below = (2.0 * k / x) * j_here - j_above
        j_above = j_here
        j_here = j_below
        if abs(j_here) > _RESCALE:
            j_here /= _RESCALE
            j_above /= _RESCALE
            norm /= _RESCALE
            out /= _RESCALE
        order = k - 1
        if order <= order_max:
            out[order] = j_here
        if order == 0:
            norm += j_here
        elif order % 2 == 0:
            norm += 2.0 * j_here
    return out / norm


def kick_kernel(phi_d: float, tail_tol: float = 1e-18):
    """Momentum-space couplings of one kick, exp(-i phi_d cos(theta)).

    Returns (orders, kernel) with kernel[k] = (-i)^k J_k(phi_d) for
    k = -K..K; the kernel is symmetric in k because J_{-k} = (-1)^k J_k
    cancels the extra (-i) powers.  K is chosen so the truncated tail is
    below tail_tol via the bound J_K(x) <= (x/2)^K / K!.
    """
    if phi_d < 0:
        raise ValueError("phi-d must be non-negative")
    half = 4
    if phi_d > 0:
        log_tol = math.log(tail_tol)
        while half * math.log(phi_d / 2.0) - math.lgamma(half + 1) > log_tol:
            half += 4
    row = bessel_j_row(half, phi_d)
    orders = np.arange(-half, half + 1)
    kernel = np.empty(orders.size, dtype=complex)
    for idx, k in enumerate(orders):
        kernel[idx] = _MINUS_I_POW[abs(int(k)) % 4] * row[abs(int(k))]
    return orders, kernel
