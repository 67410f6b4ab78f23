"""Private extended-precision context.

A cloned mpmath context pinned at 40 significant digits, so the library
never mutates the global ``mpmath.mp`` state.  40 digits covers the worst
cancellation met at desk scale (degree-12 predictors lose ~26 digits).
"""

from mpmath import mp

ctx = mp.clone()
ctx.dps = 40


def to_mpf(x):
    return ctx.mpf(x)


def to_mpc(x):
    return ctx.mpc(x)
