"""Batched multi-start damped Newton / Gauss-Newton.

Residual functions take an array of shape ``(starts, dim)`` and return
``(starts, eqs)``.  They must be analytic (no abs/conj/real) because the
Jacobian is formed by complex-step differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

ResidualFn = Callable[[np.ndarray], np.ndarray]

_CSTEP = 1e-30


def complex_step_jacobian(fun: ResidualFn, x: np.ndarray) -> np.ndarray:
    """Jacobian of shape (starts, eqs, dim), exact to rounding."""
    starts, dim = x.shape
    cols = []
    for k in range(dim):
        xk = x.astype(complex)
        xk[:, k] += 1j * _CSTEP
        cols.append(fun(xk).imag / _CSTEP)
    return np.stack(cols, axis=-1)


@dataclass
class NewtonRun:
    x: np.ndarray            # final iterates, (starts, dim)
    residual: np.ndarray     # inf-norm of the final residual, (starts,)
    singular: np.ndarray     # abandoned at the start: singular Jacobian
    failed: np.ndarray       # non-finite iterate or residual along the way


def _rnorm(fun: ResidualFn, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        r = np.real(fun(x))
    out = np.max(np.abs(r), axis=1)
    out[~np.isfinite(out)] = np.inf
    return out


def damped_newton(
    fun: ResidualFn,
    starts: np.ndarray,
    *,
    max_iter: int = 100,
    max_halvings: int = 40,
    step_tol: float = 1e-14,
    residual_tol: float = 1e-12,
) -> NewtonRun:
    """Run damped Newton from every row of ``starts``.

    Steps come from the pseudo-inverse, so an overdetermined system gets the
    Gauss-Newton step.  A start whose initial Jacobian is rank deficient is
    abandoned.  Steps are halved until the residual norm decreases; a start
    stops once the step is below ``step_tol`` (relative) and the residual is
    below ``residual_tol``, or when no halving helps.
    """
    x = np.array(starts, dtype=float, copy=True)
    n_starts = x.shape[0]
    active = np.ones(n_starts, dtype=bool)
    singular = np.zeros(n_starts, dtype=bool)
    failed = np.zeros(n_starts, dtype=bool)
    res = _rnorm(fun, x)
    failed |= ~np.isfinite(res)
    active &= ~failed

    for it in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        with np.errstate(all="ignore"):
            f = np.real(fun(xa))
            jac = complex_step_jacobian(fun, xa)
        bad = ~(np.all(np.isfinite(f), axis=1) & np.all(np.isfinite(jac), axis=(1, 2)))
        if np.any(bad):
            failed[idx[bad]] = True
            active[idx[bad]] = False
            keep = ~bad
            idx, xa, f, jac = idx[keep], xa[keep], f[keep], jac[keep]
            if idx.size == 0:
                break
        if it == 0:
            sv = np.linalg.svd(jac, compute_uv=False)
            rank_def = sv[:, -1] <= 1e-13 * np.maximum(sv[:, 0], 1e-300)
            if np.any(rank_def):
                singular[idx[rank_def]] = True
                active[idx[rank_def]] = False
                keep = ~rank_def
                idx, xa, f, jac = idx[keep], xa[keep], f[keep], jac[keep]
                if idx.size == 0:
                    break
        step = -np.einsum("sij,sj->si", np.linalg.pinv(jac, rcond=1e-15), f)

        alpha = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        current = res[idx]
        new_x = xa.copy()
        new_res = current.copy()
        for _ in range(max_halvings + 1):
            todo = ~accepted
            if not np.any(todo):
                break
            trial = xa[todo] + alpha[todo, None] * step[todo]
            tr = _rnorm(fun, trial)
            # at the noise floor a full step need not decrease the residual
            ok = (tr < current[todo]) | (tr <= residual_tol)
            sel = np.flatnonzero(todo)[ok]
            new_x[sel] = trial[ok]
            new_res[sel] = tr[ok]
            accepted[sel] = True
            alpha[todo] *= 0.5

        x[idx] = new_x
        res[idx] = new_res
        step_norm = np.max(np.abs(step), axis=1)
        scale = 1.0 + np.max(np.abs(xa), axis=1)
        done = (step_norm <= step_tol * scale) & (new_res <= residual_tol)
        active[idx[done | ~accepted]] = False

    return NewtonRun(x=x, residual=res, singular=singular, failed=failed)
