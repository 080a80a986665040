"""Vectorized one-dimensional refinement used by the extremum searches."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, tol=1e-12, maxiter=64):
    """Golden-section maximization of ``f`` on each bracket ``[lo, hi]``.

    ``f`` maps an array of abscissae to an array of values of the same
    shape; all brackets are refined in lockstep.  Returns ``(x, f(x))``.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    if lo.size == 0:
        return lo, lo.copy()
    width = float(np.max(hi - lo))
    n = 0
    if width > tol:
        n = min(maxiter, int(math.ceil(math.log(tol / width) / math.log(INV_PHI))))
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(n):
        left = fc >= fd
        lo, hi = np.where(left, lo, c), np.where(left, d, hi)
        c_new = np.where(left, hi - INV_PHI * (hi - lo), d)
        d_new = np.where(left, c, lo + INV_PHI * (hi - lo))
        f_new = f(np.where(left, c_new, d_new))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_new, d_new
    take_c = fc >= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd)


def golden_min(f, lo, hi, tol=1e-12, maxiter=64):
    x, v = golden_max(lambda t: -f(t), lo, hi, tol=tol, maxiter=maxiter)
    return x, -v


def polish_max(f, x, fx, h=1e-5, iters=4, max_step=1e-6):
    """Newton steps on a central-difference derivative.

    Sharpens a golden-section argmax of a smooth objective past the
    ``sqrt(eps)`` limit of value comparisons.  A step is kept only when it
    is short and does not lower the objective, so kinks are left alone.
    """
    x = np.array(x, dtype=float, copy=True)
    fx = np.array(fx, dtype=float, copy=True)
    for _ in range(iters):
        fp, fm = f(x + h), f(x - h)
        d1 = (fp - fm) / (2.0 * h)
        d2 = (fp - 2.0 * fx + fm) / (h * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d2 < 0.0, -d1 / d2, 0.0)
        step = np.where(np.abs(step) <= max_step, step, 0.0)
        x_new = x + step
        f_new = f(x_new)
        keep = f_new >= fx
        x = np.where(keep, x_new, x)
        fx = np.where(keep, f_new, fx)
    return x, fx
