"""Pure numpy kernels.

These are the reference implementations of the hot loops.  The compiled
backend mirrors them operation for operation: child values are accumulated
left to right, and the complex reciprocal is written out explicitly as
conjugate over modulus squared.  Keeping the operation order fixed makes
the two backends agree bit for bit, which in turn keeps experiment outputs
independent of which backend happens to be importable.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def pop_step_values(pool: np.ndarray, idx: np.ndarray, w: np.ndarray,
                    energy: float, eta: float, k: int) -> np.ndarray:
    """One population-dynamics generation.

    pool  complex values of the previous generation
    idx   flat parent indices, k per new sample
    w     total on-site potential per new sample (background + coupled noise)

    Returns 1 / (w - z - sum of k parents) per sample.
    """
    n = w.shape[0]
    vals = pool[idx].reshape(n, k)
    acc = vals[:, 0].copy()
    for j in range(1, k):
        acc += vals[:, j]
    dre = (w - energy) - acc.real
    dim = (-eta) - acc.imag
    a2 = dre * dre + dim * dim
    out = np.empty(n, dtype=np.complex128)
    out.real = dre / a2
    out.imag = (-dim) / a2
    return out


def tree_sweep(w: np.ndarray, energy: float, eta: float, k: int,
               offsets: np.ndarray) -> np.ndarray:
    """Bottom-up forward-resolvent sweep over a full truncated tree.

    w        per-vertex total potential in breadth-first order
    offsets  level start indices, offsets[d]..offsets[d+1] spans level d

    Leaves close with no children; every interior value is
    1 / (w - z - sum of children).
    """
    nv = w.shape[0]
    out = np.empty(nv, dtype=np.complex128)
    n_levels = offsets.shape[0] - 1
    for d in range(n_levels - 1, -1, -1):
        lo = int(offsets[d])
        hi = int(offsets[d + 1])
        wl = w[lo:hi]
        if d == n_levels - 1:
            dre = (wl - energy) - 0.0
            dim = np.full(hi - lo, (-eta) - 0.0)
        else:
            child = out[int(offsets[d + 1]):int(offsets[d + 2])].reshape(hi - lo, k)
            acc = child[:, 0].copy()
            for j in range(1, k):
                acc += child[:, j]
            dre = (wl - energy) - acc.real
            dim = (-eta) - acc.imag
        a2 = dre * dre + dim * dim
        seg = out[lo:hi]
        seg.real = dre / a2
        seg.imag = (-dim) / a2
    return out


def chain_many(w: np.ndarray, energy: float, eta: float, k: int) -> np.ndarray:
    """Iterate the scalar radial recursion for many chains at once.

    w is (n_steps, n_chains); row 0 is the innermost (boundary) potential
    and the iteration runs toward the root starting from 0.
    """
    m, r = w.shape
    kf = float(k)
    gre = np.zeros(r)
    gim = np.zeros(r)
    for step in range(m):
        dre = (w[step] - energy) - (kf * gre)
        dim = (-eta) - (kf * gim)
        a2 = dre * dre + dim * dim
        gre = dre / a2
        gim = (-dim) / a2
    out = np.empty(r, dtype=np.complex128)
    out.real = gre
    out.imag = gim
    return out
