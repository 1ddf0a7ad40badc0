"""Small dense linear-algebra routines for the finite-state engine.

State counts here are tiny (well under a thousand), so the solver is a
plain Gaussian elimination with partial pivoting and the spectral-radius
estimate is a fixed-budget power iteration.  Robustness and exact error
surfaces beat raw speed at this scale.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

SINGULAR_THRESHOLD = 1e-12
POWER_ITERATIONS = 500


class Singular(ValueError):
    """Elimination hit a pivot below the singularity threshold."""

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"matrix is singular at pivot {pivot_index}")


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ y = b`` by Gaussian elimination with partial pivoting.

    Raises :class:`Singular` when a pivot magnitude falls below
    ``SINGULAR_THRESHOLD``.  The residual satisfies
    ``max|a@y - b| <= 1e-9 * (1 + max|b|)`` on well-conditioned systems.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = len(b)
    if a.shape != (n, n):
        raise ValueError(f"shape mismatch: matrix {a.shape}, vector ({n},)")
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < SINGULAR_THRESHOLD:
            raise Singular(k)
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            if a[i, k] != 0.0:
                lam = a[i, k] / a[k, k]
                a[i, k + 1:] -= lam * a[k, k + 1:]
                b[i] -= lam * b[k]
    y = np.zeros(n)
    for k in range(n - 1, -1, -1):
        y[k] = (b[k] - a[k, k + 1:] @ y[k + 1:]) / a[k, k]
    return y


def neumann_partial_sum(p: np.ndarray, t: np.ndarray, terms: int) -> np.ndarray:
    """Return ``(sum_{k=0..terms} p^k) @ t`` by repeated multiply-accumulate.

    Entrywise monotone nondecreasing in ``terms`` for nonnegative inputs;
    converges to ``solve_linear(I - p, t)`` when the spectral radius of
    ``p`` is below one.
    """
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    acc = t.copy()
    v = t.copy()
    for _ in range(terms):
        v = p @ v
        acc += v
    return acc


class SpectralEstimate(NamedTuple):
    estimate: float
    row_sum_bound: float  # operator infinity-norm, always >= the true radius


def spectral_radius_estimate(p: np.ndarray, iters: int = POWER_ITERATIONS) -> SpectralEstimate:
    """Power-iteration estimate of the spectral radius of ``|p|``.

    Runs ``iters`` renormalized iterations from a random positive start
    vector and reports the geometric mean of the per-step max-norm growth
    ratios over the trailing half of the run, which averages out both the
    initial transient and any periodic cycling.  For a substochastic
    matrix every ratio is at most 1, so the estimate never exceeds 1.

    The max-row-sum upper bound is returned alongside; a zero (or
    nilpotent) matrix annihilates the iterate and yields an estimate of 0.
    """
    p = np.abs(np.asarray(p, dtype=float))
    n = p.shape[0]
    if p.shape != (n, n):
        raise ValueError(f"matrix is not square: {p.shape}")
    bound = float(p.sum(axis=1).max()) if n else 0.0
    if n == 0 or bound == 0.0:
        return SpectralEstimate(0.0, bound)
    rng = np.random.default_rng(20230517)
    x = rng.uniform(0.5, 1.5, size=n)
    x /= np.abs(x).max()
    log_ratios = []
    for _ in range(iters):
        y = p @ x
        norm = float(np.abs(y).max())
        if norm == 0.0:
            return SpectralEstimate(0.0, bound)
        log_ratios.append(np.log(norm / float(np.abs(x).max())))
        x = y / norm
    tail = log_ratios[len(log_ratios) // 2:]
    return SpectralEstimate(float(np.exp(np.mean(tail))), bound)
