"""Pure-numpy theta summation kernel (fallback backend).

theta_sum computes sum_{n=-nmax..nmax} exp(i*pi*(n+rho)^2*z +
2*pi*i*(n+rho)*(u+s) - shift) for a flat array of points u, optionally with
the d/du derivative factor 2*pi*i*(n+rho) applied per term.

Each term's exponent is assembled before a single exp call, so partial
factors never overflow on their own; the optional per-point real shift lets
callers pull a known magnitude out of the sum and reapply it outside.
"""

import numpy as np

BACKEND = "python"


def theta_sum(u, z, rho, s, nmax, derivative=False, shift=None):
    u = np.ascontiguousarray(u, dtype=np.complex128)
    n = np.arange(-nmax, nmax + 1, dtype=np.float64)
    m = n + rho
    exponent = (
        1j * np.pi * m * m * z
        + 2j * np.pi * m * s
        + 2j * np.pi * np.multiply.outer(u, m)
    )
    if shift is not None:
        exponent = exponent - np.asarray(shift, dtype=np.float64)[:, None]
    terms = np.exp(exponent)
    if derivative:
        return terms @ (2j * np.pi * m)
    return terms.sum(axis=1)
