"""Brownian sheets on a cell grid, PWZ integrals and the processes Y_h.

A sheet is stored as its cell increments ``dx[i, j]``; the path value at a
grid node is the sum of increments in the cells below and to the left of it,
so the path vanishes on the axes by construction.

Random numbers come from counter-based Philox streams. Sample ``k`` of stream
``(seed, stream, lane)`` is drawn from a fresh ``numpy.random.Philox`` with
key ``(seed, stream)`` and counter ``(0, 0, lane, k)``, and standard normals are
produced by numpy's ziggurat transform (``Generator.standard_normal``). Every
sample is therefore addressable on its own, and batched or threaded sampling
reproduces exactly the same sheets whatever the block layout or worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import GridFunction, GridSpec, require_same_grid, window

__all__ = [
    "RngStream",
    "SheetPath",
    "sample_sheet",
    "sample_sheets",
    "sample_increments",
    "map_sample_blocks",
    "zero_path",
    "pwz_integral",
    "pwz_samples",
    "gaussian_path",
    "coupled_processes",
    "process_covariance",
    "process_covariance_samples",
    "empirical_process_covariance",
]

_MASK64 = (1 << 64) - 1
BLOCK_SIZE = 512


@dataclass(frozen=True)
class RngStream:
    """Address of an independent random stream: ``(seed, stream, lane)``."""

    seed: int
    stream: int = 0
    lane: int = 0

    def __post_init__(self):
        for name in ("seed", "stream", "lane"):
            value = getattr(self, name)
            if int(value) != value or not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {value!r}")

    def child(self, lane: int) -> RngStream:
        """Stream with the same key and a different lane."""
        return RngStream(self.seed, self.stream, lane)

    def generator(self, index: int = 0) -> np.random.Generator:
        bitgen = np.random.Philox(
            key=[self.seed & _MASK64, self.stream & _MASK64],
            counter=[0, 0, self.lane, int(index)],
        )
        return np.random.Generator(bitgen)


@dataclass(frozen=True, eq=False)
class SheetPath:
    """A continuous path on Q given by its cell increments."""

    grid: GridSpec
    increments: np.ndarray

    def __post_init__(self):
        inc = np.array(self.increments, dtype=float).reshape(self.grid.shape)
        inc.setflags(write=False)
        object.__setattr__(self, "increments", inc)

    def node_values(self) -> np.ndarray:
        """Path values at all grid nodes, shape ``(ns + 1, nt + 1)``."""
        out = np.zeros((self.grid.ns + 1, self.grid.nt + 1))
        out[1:, 1:] = self.increments.cumsum(axis=0).cumsum(axis=1)
        return out

    def value_at(self, s: float, t: float) -> float:
        ones = GridFunction(self.grid, np.ones(self.grid.shape))
        return pwz_integral(window(ones, s, t), self)

    def scaled(self, rho: float) -> SheetPath:
        return SheetPath(self.grid, self.increments * rho)

    def __add__(self, other: SheetPath) -> SheetPath:
        require_same_grid(self, other)
        return SheetPath(self.grid, self.increments + other.increments)

    def __sub__(self, other: SheetPath) -> SheetPath:
        require_same_grid(self, other)
        return SheetPath(self.grid, self.increments - other.increments)

    def __neg__(self) -> SheetPath:
        return SheetPath(self.grid, -self.increments)


def zero_path(grid: GridSpec) -> SheetPath:
    return SheetPath(grid, np.zeros(grid.shape))


def sample_increments(grid: GridSpec, rng: RngStream, start: int, count: int) -> np.ndarray:
    """Increments of samples ``start .. start + count - 1``, shape ``(count, ns, nt)``."""
    out = np.empty((count, grid.size))
    for k in range(count):
        rng.generator(start + k).standard_normal(out=out[k])
    out *= np.sqrt(grid.cell_area)
    return out.reshape(count, grid.ns, grid.nt)


def sample_sheet(grid: GridSpec, rng: RngStream, index: int = 0) -> SheetPath:
    """Draw sample ``index`` of ``rng`` from the discrete Yeh-Wiener measure.

    Cell increments are independent centred Gaussians with variance equal to
    the cell area.
    """
    return SheetPath(grid, sample_increments(grid, rng, index, 1)[0])


def sample_sheets(grid: GridSpec, rng: RngStream, n: int, start: int = 0) -> list[SheetPath]:
    inc = sample_increments(grid, rng, start, n)
    return [SheetPath(grid, dx) for dx in inc]


def map_sample_blocks(
    fn: Callable[[np.ndarray, int], np.ndarray],
    grid: GridSpec,
    rng: RngStream,
    n: int,
    workers: int = 1,
    block: int = BLOCK_SIZE,
) -> np.ndarray:
    """Apply ``fn(increments, start)`` to consecutive sample blocks and concatenate.

    Results are joined in block order, so the output does not depend on
    ``workers``.
    """
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    starts = list(range(0, n, block))

    def run(start):
        count = min(block, n - start)
        return fn(sample_increments(grid, rng, start, count), start)

    if workers <= 1 or len(starts) <= 1:
        parts = [run(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    if not parts:
        return np.empty(0)
    return np.concatenate(parts, axis=0)


def pwz_integral(v: GridFunction, x: SheetPath) -> float:
    """Riemann-Stieltjes sum of ``v`` against the increments of ``x``."""
    require_same_grid(v, x)
    return float(np.sum(v.values * x.increments))


def pwz_samples(
    vs: Sequence[GridFunction], rng: RngStream, n: int, workers: int = 1
) -> np.ndarray:
    """``<v_k, x_m>`` for ``n`` sheets ``x_m`` drawn from ``rng``; shape ``(n, len(vs))``."""
    grid = require_same_grid(*vs)
    W = np.stack([v.values.ravel() for v in vs], axis=1)
    return map_sample_blocks(lambda dx, _: dx.reshape(len(dx), -1) @ W, grid, rng, n, workers)


def gaussian_path(h: GridFunction, x: SheetPath) -> SheetPath:
    """The path ``(s, t) -> <chi_[0,s]x[0,t] h, x>``; its increments are ``h * dx``."""
    require_same_grid(h, x)
    return SheetPath(x.grid, h.values * x.increments)


def coupled_processes(
    h1: GridFunction, k1: GridFunction, h2: GridFunction, k2: GridFunction,
    x1: SheetPath, x2: SheetPath,
) -> tuple[SheetPath, SheetPath]:
    """``Y_h1(x1) + Y_k1(x2)`` and ``Y_h2(x1) - Y_k2(x2)``.

    The pair is independent exactly when ``h1 * h2 == k1 * k2``.
    """
    return (
        gaussian_path(h1, x1) + gaussian_path(k1, x2),
        gaussian_path(h2, x1) - gaussian_path(k2, x2),
    )


def _check_point(grid: GridSpec, p) -> tuple[float, float]:
    s, t = map(float, p)
    if not grid.contains(s, t):
        raise ValueError(f"point {p} lies outside [0,{grid.S}]x[0,{grid.T}]")
    return s, t


def process_covariance(h1: GridFunction, h2: GridFunction, p, p2) -> float:
    """Grid-level covariance of ``Y_h1(x; p)`` and ``Y_h2(x; p2)``."""
    grid = require_same_grid(h1, h2)
    s, t = _check_point(grid, p)
    s2, t2 = _check_point(grid, p2)
    return float(
        np.sum(window(h1, s, t).values * window(h2, s2, t2).values) * grid.cell_area
    )


def process_covariance_samples(
    h1: GridFunction, h2: GridFunction, p, p2, n: int, rng: RngStream, workers: int = 1
) -> np.ndarray:
    """Per-sheet products ``Y_h1(x; p) * Y_h2(x; p2)`` for ``n`` sheets."""
    grid = require_same_grid(h1, h2)
    s, t = _check_point(grid, p)
    s2, t2 = _check_point(grid, p2)
    a = window(h1, s, t)
    b = window(h2, s2, t2)
    prod = pwz_samples([a, b], rng, n, workers)
    return prod[:, 0] * prod[:, 1]


def empirical_process_covariance(
    h1: GridFunction, h2: GridFunction, p, p2, n: int, rng: RngStream, workers: int = 1
) -> float:
    return float(np.mean(process_covariance_samples(h1, h2, p, p2, n, rng, workers)))
