"""Uniform cell grids on the rectangle Q = [0, S] x [0, T].

Functions on Q are stored by their values at cell midpoints; integrals use the
midpoint rule. Arrays are indexed ``[i, j]`` with ``i`` running along ``s``
and ``j`` along ``t``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import GridMismatchError, InvalidFunctionError, SupportWarning

__all__ = [
    "GridSpec",
    "GridFunction",
    "make_grid",
    "sample_function",
    "constant",
    "l2_inner",
    "l2_norm_sq",
    "pointwise_mul",
    "combine_kernels",
    "window",
    "check_support",
    "require_same_grid",
]


@dataclass(frozen=True)
class GridSpec:
    S: float
    T: float
    ns: int
    nt: int

    def __post_init__(self):
        if not (np.isfinite(self.S) and self.S > 0 and np.isfinite(self.T) and self.T > 0):
            raise ValueError(f"extents must be positive, got S={self.S}, T={self.T}")
        if int(self.ns) != self.ns or int(self.nt) != self.nt or self.ns < 1 or self.nt < 1:
            raise ValueError(f"cell counts must be positive integers, got {self.ns}x{self.nt}")

    @property
    def ds(self) -> float:
        return self.S / self.ns

    @property
    def dt(self) -> float:
        return self.T / self.nt

    @property
    def cell_area(self) -> float:
        return self.ds * self.dt

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ns, self.nt)

    @property
    def size(self) -> int:
        return self.ns * self.nt

    @cached_property
    def s_mid(self) -> np.ndarray:
        return (np.arange(self.ns) + 0.5) * self.ds

    @cached_property
    def t_mid(self) -> np.ndarray:
        return (np.arange(self.nt) + 0.5) * self.dt

    @property
    def s_nodes(self) -> np.ndarray:
        return np.arange(self.ns + 1) * self.ds

    @property
    def t_nodes(self) -> np.ndarray:
        return np.arange(self.nt + 1) * self.dt

    def midpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(s, t)`` midpoint coordinate arrays of shape ``(ns, nt)``."""
        return np.meshgrid(self.s_mid, self.t_mid, indexing="ij")

    def contains(self, s: float, t: float) -> bool:
        return 0.0 <= s <= self.S and 0.0 <= t <= self.T


def make_grid(S: float = 1.0, T: float = 1.0, ns: int = 64, nt: int = 64) -> GridSpec:
    return GridSpec(float(S), float(T), int(ns), int(nt))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A real function on Q represented by its midpoint values."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size != self.grid.size:
            raise GridMismatchError(
                f"expected {self.grid.size} values for a {self.grid.ns}x{self.grid.nt} grid, "
                f"got {values.size}"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise InvalidFunctionError("grid function contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _other(self, other):
        if isinstance(other, GridFunction):
            require_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def __pow__(self, p):
        return GridFunction(self.grid, self.values**p)

    def allclose(self, other: GridFunction, atol: float = 1e-12) -> bool:
        require_same_grid(self, other)
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def __repr__(self):
        g = self.grid
        return f"GridFunction({g.ns}x{g.nt} on [0,{g.S}]x[0,{g.T}])"


def require_same_grid(*objs) -> GridSpec:
    """Return the common grid of ``objs`` or raise :class:`GridMismatchError`."""
    grid = objs[0].grid
    for obj in objs[1:]:
        if obj.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {obj.grid}")
    return grid


def sample_function(fn: Callable, grid: GridSpec) -> GridFunction:
    """Evaluate ``fn(s, t)`` at every cell midpoint.

    ``fn`` is called once with broadcast midpoint arrays; scalar results are
    broadcast to the full grid.
    """
    s, t = grid.midpoints()
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(fn(s, t), dtype=float), grid.shape)
    if not np.all(np.isfinite(values)):
        raise InvalidFunctionError("function is not finite at every cell midpoint")
    return GridFunction(grid, values)


def constant(value: float, grid: GridSpec) -> GridFunction:
    return GridFunction(grid, np.full(grid.shape, float(value)))


def l2_inner(u: GridFunction, v: GridFunction) -> float:
    grid = require_same_grid(u, v)
    return float(np.sum(u.values * v.values) * grid.cell_area)


def l2_norm_sq(u: GridFunction) -> float:
    return l2_inner(u, u)


def pointwise_mul(u: GridFunction, h: GridFunction) -> GridFunction:
    return u * h


def combine_kernels(H: Sequence[GridFunction]) -> GridFunction:
    """Nonnegative cellwise root of the sum of squared kernels.

    Any function whose square equals ``sum(h**2 for h in H)`` would do; only
    the square enters downstream formulas, so the nonnegative root is used.
    """
    H = list(H)
    if not H:
        raise ValueError("combine_kernels needs at least one kernel")
    grid = require_same_grid(*H)
    total = np.zeros(grid.shape)
    for h in H:
        total = total + h.values**2
    return GridFunction(grid, np.sqrt(total))


def window(h: GridFunction, s: float, t: float) -> GridFunction:
    """Restrict ``h`` to the cells whose midpoints lie in ``[0, s] x [0, t]``."""
    grid = h.grid
    if not grid.contains(s, t):
        raise ValueError(f"point ({s}, {t}) lies outside [0,{grid.S}]x[0,{grid.T}]")
    mask = np.outer(grid.s_mid <= s, grid.t_mid <= t)
    return GridFunction(grid, np.where(mask, h.values, 0.0))


def check_support(h: GridFunction, name: str = "kernel") -> bool:
    """Warn if ``h`` vanishes at some midpoint; return True when it does not."""
    zeros = int(np.count_nonzero(h.values == 0.0))
    if zeros:
        warnings.warn(
            f"{name} vanishes at {zeros} of {h.grid.size} cell midpoints",
            SupportWarning,
            stacklevel=3,
        )
    return zeros == 0
