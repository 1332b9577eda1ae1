"""Cylinder functionals with finitely supported measures.

A functional ``F(x) = sum_j c_j exp(i <u_j, x>)`` is carried by its measure:
complex weights ``c_j`` and real atoms ``u_j`` sampled on a grid. Transforms
and convolutions act on the measure directly, so every identity between them
reduces to finite sums that can be compared exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

import numpy as np

from .grid import GridFunction, GridSpec, require_same_grid
from .sheet import SheetPath

__all__ = [
    "DiscreteMeasure",
    "CylinderFunctional",
    "RealLambda",
    "FeynmanQ",
    "FeynmanParameter",
    "evaluate",
    "evaluate_many",
    "scale_path",
    "phase_norms",
    "gfyft",
    "gfyft_real_lambda",
    "gcp",
    "gcp_real_lambda",
    "scaled_product",
    "reflect",
    "compact",
    "with_phase_shift",
    "unit_mass",
    "random_functional",
]

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weights ``(m,)`` complex and atoms ``(m, ns, nt)`` real on one grid."""

    grid: GridSpec
    weights: np.ndarray
    atoms: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=complex).reshape(-1)
        a = np.array(self.atoms, dtype=float).reshape(len(w), *self.grid.shape)
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(a))):
            raise ValueError("measure weights and atoms must be finite")
        w.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "atoms", a)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[complex, GridFunction]], grid: GridSpec | None = None):
        pairs = list(pairs)
        if not pairs:
            if grid is None:
                raise ValueError("an empty measure needs an explicit grid")
            return cls.zero(grid)
        grid = require_same_grid(*(u for _, u in pairs))
        return cls(grid, [c for c, _ in pairs], np.stack([u.values for _, u in pairs]))

    @classmethod
    def zero(cls, grid: GridSpec):
        return cls(grid, np.zeros(0, complex), np.zeros((0, *grid.shape)))

    def __len__(self):
        return len(self.weights)

    def __iter__(self) -> Iterator[tuple[complex, GridFunction]]:
        for c, u in zip(self.weights, self.atoms):
            yield complex(c), GridFunction(self.grid, u)

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    @property
    def total_mass(self) -> complex:
        return complex(np.sum(self.weights))

    def flat_atoms(self) -> np.ndarray:
        return self.atoms.reshape(len(self), -1)

    def __add__(self, other: DiscreteMeasure) -> DiscreteMeasure:
        require_same_grid(self, other)
        return DiscreteMeasure(
            self.grid,
            np.concatenate([self.weights, other.weights]),
            np.concatenate([self.atoms, other.atoms]),
        )


class CylinderFunctional:
    """``F(x) = sum_j c_j exp(i <u_j, x>)`` for a :class:`DiscreteMeasure`."""

    __slots__ = ("measure",)

    def __init__(self, measure: DiscreteMeasure):
        self.measure = measure

    @classmethod
    def from_pairs(cls, pairs, grid: GridSpec | None = None) -> CylinderFunctional:
        return cls(DiscreteMeasure.from_pairs(pairs, grid))

    @property
    def grid(self) -> GridSpec:
        return self.measure.grid

    @property
    def weights(self) -> np.ndarray:
        return self.measure.weights

    @property
    def atoms(self) -> np.ndarray:
        return self.measure.atoms

    def __len__(self):
        return len(self.measure)

    def __call__(self, y: SheetPath) -> complex:
        return evaluate(self, y)

    def __add__(self, other: CylinderFunctional) -> CylinderFunctional:
        return CylinderFunctional(self.measure + other.measure)

    def __repr__(self):
        return f"CylinderFunctional({len(self)} atoms, ||f||={self.measure.total_variation:.4g})"


@dataclass(frozen=True)
class RealLambda:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class FeynmanQ:
    """The Feynman limit ``lambda -> -i q``."""

    q: float

    def __post_init__(self):
        if self.q == 0 or not np.isfinite(self.q):
            raise ValueError("q must be a nonzero real number")


FeynmanParameter = Union[RealLambda, FeynmanQ]


def _check_q(q: float) -> float:
    q = float(q)
    if q == 0 or not np.isfinite(q):
        raise ValueError("q must be a nonzero real number")
    return q


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not (lam > 0 and np.isfinite(lam)):
        raise ValueError(f"lambda must be a positive real number, got {lam}")
    return lam


def evaluate(F: CylinderFunctional, y: SheetPath) -> complex:
    require_same_grid(F, y)
    return complex(evaluate_many(F, y.increments[None])[0])


def evaluate_many(F: CylinderFunctional, increments: np.ndarray) -> np.ndarray:
    """Evaluate ``F`` on a stack of paths given as increments ``(n, ns, nt)``."""
    inc = np.asarray(increments, dtype=float)
    inc = inc.reshape(len(inc), -1)
    if inc.shape[1] != F.grid.size:
        raise ValueError("increment stack does not match the functional's grid")
    if len(F) == 0:
        return np.zeros(len(inc), complex)
    phases = inc @ F.measure.flat_atoms().T
    return np.exp(1j * phases) @ F.weights


def scale_path(y: SheetPath, rho: float) -> SheetPath:
    return y.scaled(rho)


def phase_norms(F: CylinderFunctional, h: GridFunction) -> np.ndarray:
    """``||u_j h||_2^2`` for every atom of ``F``."""
    require_same_grid(F, h)
    prod = F.atoms * h.values
    return np.sum(prod * prod, axis=(1, 2)) * F.grid.cell_area


def _reweight(F: CylinderFunctional, weights) -> CylinderFunctional:
    return CylinderFunctional(DiscreteMeasure(F.grid, weights, F.atoms))


def gfyft(F: CylinderFunctional, h: GridFunction, q: float) -> CylinderFunctional:
    """Generalized Fourier-Yeh-Feynman transform ``T_{q,h}(F)``.

    Atoms are kept; each weight picks up the phase ``exp(-i ||u_j h||^2 / (2q))``.
    """
    q = _check_q(q)
    return _reweight(F, F.weights * np.exp(-1j * phase_norms(F, h) / (2.0 * q)))


def gfyft_real_lambda(F: CylinderFunctional, h: GridFunction, lam: float) -> CylinderFunctional:
    """``y -> E[F(y + lam**-.5 Y_h(x))]`` for ``lam > 0``, as a functional."""
    lam = _check_lambda(lam)
    return _reweight(F, F.weights * np.exp(-phase_norms(F, h) / (2.0 * lam)))


def _pair_atoms(F: CylinderFunctional, G: CylinderFunctional) -> np.ndarray:
    return ((F.atoms[:, None] + G.atoms[None, :]) / SQRT2).reshape(-1, *F.grid.shape)


def _convolve(F, G, k1, k2, coef) -> CylinderFunctional:
    grid = require_same_grid(F, G, k1, k2)
    diff = F.atoms[:, None] * k1.values - G.atoms[None, :] * k2.values
    norms = np.sum(diff * diff, axis=(2, 3)) * grid.cell_area
    weights = np.outer(F.weights, G.weights) * np.exp(coef * norms)
    return CylinderFunctional(DiscreteMeasure(grid, weights.ravel(), _pair_atoms(F, G)))


def gcp(
    F: CylinderFunctional,
    G: CylinderFunctional,
    k1: GridFunction,
    k2: GridFunction,
    q: float,
) -> CylinderFunctional:
    """Generalized convolution product ``(F * G)_q^{(k1, k2)}``.

    Atoms ``(u_j + v_k) / sqrt(2)`` over all pairs, weights
    ``c_j d_k exp(-i ||u_j k1 - v_k k2||^2 / (4q))``. The pair index is
    row-major: atom ``j * len(G) + k``.
    """
    q = _check_q(q)
    return _convolve(F, G, k1, k2, -1j / (4.0 * q))


def gcp_real_lambda(F, G, k1, k2, lam: float) -> CylinderFunctional:
    """``y -> E[F((y + lam**-.5 Y_k1(x)) / sqrt2) G((y - lam**-.5 Y_k2(x)) / sqrt2)]``."""
    lam = _check_lambda(lam)
    return _convolve(F, G, k1, k2, -1.0 / (4.0 * lam))


def scaled_product(F: CylinderFunctional, G: CylinderFunctional) -> CylinderFunctional:
    """The functional ``y -> F(y / sqrt 2) G(y / sqrt 2)``."""
    grid = require_same_grid(F, G)
    weights = np.outer(F.weights, G.weights).ravel()
    return CylinderFunctional(DiscreteMeasure(grid, weights, _pair_atoms(F, G)))


def reflect(F: CylinderFunctional) -> CylinderFunctional:
    """``x -> F(-x)``."""
    return CylinderFunctional(DiscreteMeasure(F.grid, F.weights, -F.atoms))


def compact(F: CylinderFunctional, tol: float = 1e-12) -> CylinderFunctional:
    """Merge atoms that agree cellwise within ``tol`` and drop zero weights."""
    flat = F.measure.flat_atoms()
    kept_atoms: list[np.ndarray] = []
    kept_weights: list[complex] = []
    for c, u in zip(F.weights, flat):
        for k, v in enumerate(kept_atoms):
            if np.max(np.abs(u - v), initial=0.0) <= tol:
                kept_weights[k] += c
                break
        else:
            kept_atoms.append(u)
            kept_weights.append(complex(c))
    keep = [k for k, c in enumerate(kept_weights) if c != 0]
    if not keep:
        return CylinderFunctional(DiscreteMeasure.zero(F.grid))
    return CylinderFunctional(
        DiscreteMeasure(F.grid, [kept_weights[k] for k in keep], np.stack([kept_atoms[k] for k in keep]))
    )


def with_phase_shift(F: CylinderFunctional, index: int, delta: float) -> CylinderFunctional:
    """Copy of ``F`` with the phase of weight ``index`` rotated by ``delta``."""
    w = F.weights.copy()
    w[index] *= np.exp(1j * delta)
    return _reweight(F, w)


def unit_mass(u: GridFunction, weight: complex = 1.0) -> CylinderFunctional:
    return CylinderFunctional.from_pairs([(weight, u)])


def random_functional(
    grid: GridSpec,
    gen: np.random.Generator,
    n_atoms: int | None = None,
    max_atoms: int = 5,
    scale: float = 1.0,
) -> CylinderFunctional:
    """A random functional with smooth atoms and weights in the unit disc.

    Atoms are random combinations of ``1, s, t, s t`` and one low-frequency
    product of sines and cosines, so they are of bounded variation.
    """
    if n_atoms is None:
        n_atoms = int(gen.integers(1, max_atoms + 1))
    s, t = grid.midpoints()
    s = s / grid.S
    t = t / grid.T
    atoms = []
    for _ in range(n_atoms):
        a = gen.uniform(-1.0, 1.0, size=5)
        fs, ft = gen.integers(1, 4, size=2)
        trig = np.sin(np.pi * fs * s + gen.uniform(0, np.pi)) * np.cos(np.pi * ft * t)
        atoms.append(scale * (a[0] + a[1] * s + a[2] * t + a[3] * s * t + a[4] * trig))
    radius = np.sqrt(gen.uniform(0.1, 1.0, size=n_atoms))
    angle = gen.uniform(0, 2 * np.pi, size=n_atoms)
    return CylinderFunctional(DiscreteMeasure(grid, radius * np.exp(1j * angle), np.stack(atoms)))
