"""Multiple-precision power-series trajectories of quadratic ODE systems.

Numbers going in are accepted as strings or Python numbers; numbers are passed on
through ``str()``, so ``0.7`` means the decimal 0.7, not its binary double.
"""

from . import _core
from ._core import (
    BallEscape,
    ConfigError,
    Context,
    Error,
    System,
    kaplan_yorke,
    machine_epsilon,
)

__all__ = [
    "BallEscape", "ConfigError", "Context", "Error", "System",
    "catalog_system", "load_system_file", "tumor", "lorenz",
    "integrate", "verify", "returns", "rk4_compare", "lyapunov",
    "kaplan_yorke", "machine_epsilon",
]


def _dec(v):
    return v if isinstance(v, str) else repr(v)


def _vec(xs):
    return [_dec(v) for v in xs]


def catalog_system(ctx, model, **params):
    return _core.catalog_system(ctx, model, {k: _dec(v) for k, v in params.items()})


def tumor(ctx, N=5, H=3, I="0.7"):
    return catalog_system(ctx, "tumor", N=N, H=H, I=I)


def lorenz(ctx, sigma=10, r=28, b="8/3"):
    return catalog_system(ctx, "lorenz", sigma=sigma, r=r, b=b)


def load_system_file(ctx, path):
    return _core.load_system_file(ctx, str(path))


def integrate(system, x0, T, ctx, grid="0.01", direction="forward", ball=None, digits=20):
    if ball is not None:
        ball = (_vec(ball[0]), _dec(ball[1]))
    return _core.integrate(system, _vec(x0), _dec(T), ctx, _dec(grid), direction, ball, digits)


def verify(system, x0, T, ctx, ball=None):
    if ball is not None:
        ball = (_vec(ball[0]), _dec(ball[1]))
    return _core.verify(system, _vec(x0), _dec(T), ctx, ball)


def returns(system, x0, T, ctx, grid="0.001", window=5):
    return _core.returns(system, _vec(x0), _dec(T), ctx, _dec(grid), window)


def rk4_compare(system, x0, T, ctx, steps=("0.05", "0.01", "0.005", "0.001")):
    return _core.rk4_compare(system, _vec(x0), _dec(T), ctx, _vec(steps))


def lyapunov(system, x0, T, segments, ctx, group="1"):
    return _core.lyapunov(system, _vec(x0), _dec(T), segments, ctx, str(group))
