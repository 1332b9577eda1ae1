"""Analytic Yeh-Feynman integrals in closed form and their Monte Carlo shadows.

For ``F = sum_j c_j exp(i <u_j, .>)`` the scaled expectation

    J_F(h; lam) = E[F(lam**-0.5 * Y_h(x))] = sum_j c_j exp(-||u_j h||^2 / (2 lam))

is a genuine Gaussian expectation for ``lam > 0`` and is estimated by sampling
sheets. Its continuation to ``lam = -i q`` is only ever evaluated in closed
form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import CylinderFunctional, FeynmanQ, RealLambda, _check_lambda, _check_q, phase_norms
from .errors import DegenerateParameterError
from .grid import GridFunction, check_support, require_same_grid
from .sheet import RngStream, map_sample_blocks

__all__ = [
    "MCEstimate",
    "feynman_closed_form",
    "closed_form_real_lambda",
    "feynman_integral",
    "iterated_closed_form",
    "iterated_q_closed_form",
    "two_kernel_closed_form",
    "yeh_wiener_mc",
    "yeh_wiener_mc_many",
    "yeh_wiener_samples",
    "iterated_mc_two_kernels",
    "alpha_n",
    "checkpoints",
    "running_estimates",
]


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean of a complex quantity with per-component standard errors."""

    mean: complex
    se_re: float
    se_im: float
    n: int
    seed: int

    @classmethod
    def from_samples(cls, values: np.ndarray, seed: int) -> MCEstimate:
        values = np.asarray(values, dtype=complex)
        n = len(values)
        if n < 2:
            raise ValueError("an estimate needs at least two samples")
        se_re = float(np.std(values.real, ddof=1) / np.sqrt(n))
        se_im = float(np.std(values.imag, ddof=1) / np.sqrt(n))
        return cls(complex(np.mean(values)), se_re, se_im, n, int(seed))

    @property
    def std_error(self) -> tuple[float, float]:
        return (self.se_re, self.se_im)

    def z_scores(self, value: complex, extra: tuple[float, float] = (0.0, 0.0)) -> tuple[float, float]:
        """Componentwise ``|mean - value| / sigma``; ``extra`` adds a second estimate's errors."""
        d = self.mean - complex(value)
        sig_re = np.hypot(self.se_re, extra[0])
        sig_im = np.hypot(self.se_im, extra[1])
        return (_ratio(abs(d.real), sig_re), _ratio(abs(d.imag), sig_im))

    def within(self, value: complex, k: float = 3.0) -> bool:
        return max(self.z_scores(value)) <= k

    def agrees(self, other: MCEstimate, k: float = 3.0) -> bool:
        return max(self.z_scores(other.mean, other.std_error)) <= k

    def to_record(self) -> dict:
        return {
            "mean_re": self.mean.real,
            "mean_im": self.mean.imag,
            "se_re": self.se_re,
            "se_im": self.se_im,
            "n": self.n,
            "seed": self.seed,
        }


def _ratio(diff: float, sigma: float) -> float:
    if sigma == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return diff / sigma


def feynman_closed_form(F: CylinderFunctional, h: GridFunction, q: float) -> complex:
    """``sum_j c_j exp(-i ||u_j h||^2 / (2q))``."""
    q = _check_q(q)
    check_support(h)
    return complex(np.sum(F.weights * np.exp(-1j * phase_norms(F, h) / (2.0 * q))))


def closed_form_real_lambda(F: CylinderFunctional, h: GridFunction, lam: float) -> complex:
    lam = _check_lambda(lam)
    return complex(np.sum(F.weights * np.exp(-phase_norms(F, h) / (2.0 * lam))))


def feynman_integral(F: CylinderFunctional, h: GridFunction, param) -> complex:
    if isinstance(param, RealLambda):
        return closed_form_real_lambda(F, h, param.lam)
    if isinstance(param, FeynmanQ):
        return feynman_closed_form(F, h, param.q)
    raise TypeError(f"expected RealLambda or FeynmanQ, got {type(param).__name__}")


def iterated_closed_form(F: CylinderFunctional, H: Sequence[GridFunction], q: float) -> complex:
    """Iterated Feynman integral over independent processes ``Y_{h_1}, ..., Y_{h_n}``."""
    q = _check_q(q)
    H = list(H)
    if not H:
        raise ValueError("need at least one kernel")
    total = sum(phase_norms(F, h) for h in H)
    return complex(np.sum(F.weights * np.exp(-1j * total / (2.0 * q))))


def iterated_q_closed_form(F: CylinderFunctional, h: GridFunction, qs: Sequence[float]) -> complex:
    """Iterated integral of ``F(Y_h(x_1) + ... + Y_h(x_n))`` with parameters ``q_1, ..., q_n``.

    Each stage contributes its own phase ``-i ||u h||^2 / (2 q_k)``.
    """
    alpha_n(qs)  # validates the partial-sum hypothesis
    norms = phase_norms(F, h)
    exponent = sum(-1j * norms / (2.0 * float(q)) for q in qs)
    return complex(np.sum(F.weights * np.exp(exponent)))


def two_kernel_closed_form(
    F: CylinderFunctional, h1: GridFunction, h2: GridFunction, lam1: float, lam2: float
) -> complex:
    """``E[F(lam1**-.5 Y_h1(x1) + lam2**-.5 Y_h2(x2))]`` over independent sheets."""
    lam1, lam2 = _check_lambda(lam1), _check_lambda(lam2)
    expo = -phase_norms(F, h1) / (2 * lam1) - phase_norms(F, h2) / (2 * lam2)
    return complex(np.sum(F.weights * np.exp(expo)))


def alpha_n(qs: Sequence[float]) -> float:
    """Reciprocal of ``1/q_1 + ... + 1/q_n``.

    Raises :class:`DegenerateParameterError` if a partial sum with at least
    two terms vanishes.
    """
    qs = [float(q) for q in qs]
    if not qs:
        raise ValueError("need at least one parameter")
    partial = 0.0
    for k, q in enumerate(qs, start=1):
        if q == 0 or not np.isfinite(q):
            raise ValueError("every q must be a nonzero real number")
        partial += 1.0 / q
        if k >= 2 and abs(partial) <= 1e-15 * sum(1.0 / abs(p) for p in qs[:k]):
            raise DegenerateParameterError(
                f"1/q_1 + ... + 1/q_{k} vanishes for qs={qs[:k]}"
            )
    return 1.0 / partial


def yeh_wiener_samples(
    cases: Sequence[tuple[CylinderFunctional, GridFunction, float]],
    n: int,
    rng: RngStream,
    workers: int = 1,
) -> np.ndarray:
    """Per-sheet values ``F(lam**-.5 Y_h(x))`` for several cases on shared sheets.

    Returns an array of shape ``(n, len(cases))``. Column ``k`` equals what a
    single-case call with the same stream would produce.
    """
    if not cases:
        raise ValueError("no cases given")
    grid = require_same_grid(*(F for F, _, _ in cases), *(h for _, h, _ in cases))
    # one projection matrix per distinct (F, h); lambda only rescales
    keys: dict[tuple[int, int], slice] = {}
    blocks = []
    col = 0
    for F, h, lam in cases:
        _check_lambda(lam)
        key = (id(F), id(h))
        if key not in keys and len(F):
            W = (F.atoms * h.values).reshape(len(F), -1)
            blocks.append(W)
            keys[key] = slice(col, col + len(F))
            col += len(F)
    W_all = np.concatenate(blocks, axis=0).T if blocks else np.zeros((grid.size, 0))

    def run(dx, _start):
        proj = dx.reshape(len(dx), -1) @ W_all
        out = np.empty((len(dx), len(cases)), complex)
        for k, (F, h, lam) in enumerate(cases):
            if not len(F):
                out[:, k] = 0.0
                continue
            phase = proj[:, keys[(id(F), id(h))]] / np.sqrt(lam)
            out[:, k] = np.exp(1j * phase) @ F.weights
        return out

    return map_sample_blocks(run, grid, rng, n, workers).reshape(n, len(cases))


def yeh_wiener_mc_many(cases, n: int, rng: RngStream, workers: int = 1) -> list[MCEstimate]:
    if n < 2:
        raise ValueError("n must be at least 2")
    values = yeh_wiener_samples(cases, n, rng, workers)
    return [MCEstimate.from_samples(values[:, k], rng.seed) for k in range(len(cases))]


def yeh_wiener_mc(
    F: CylinderFunctional,
    h: GridFunction,
    lam: float,
    n: int,
    rng: RngStream,
    workers: int = 1,
) -> MCEstimate:
    """Monte Carlo estimate of ``J_F(h; lam)`` from ``n`` sheets of ``rng``."""
    lam = _check_lambda(lam)
    if n < 2:
        raise ValueError("n must be at least 2")
    check_support(h)
    return yeh_wiener_mc_many([(F, h, lam)], n, rng, workers)[0]


def _projections(W: np.ndarray, grid, rng: RngStream, n: int, workers: int) -> np.ndarray:
    return map_sample_blocks(lambda dx, _: dx.reshape(len(dx), -1) @ W, grid, rng, n, workers)


def iterated_mc_two_kernels(
    F: CylinderFunctional,
    h1: GridFunction,
    h2: GridFunction,
    lam1: float,
    lam2: float,
    n_outer: int,
    n_inner: int,
    rng: RngStream,
    inner: str = "x1",
    workers: int = 1,
) -> MCEstimate:
    """Nested estimate of ``E_x2[E_x1[F(lam1**-.5 Y_h1(x1) + lam2**-.5 Y_h2(x2))]]``.

    The outer sheets come from lane 1 of ``rng`` and the inner sheets from
    lane 2; ``inner`` names which of ``x1``/``x2`` is integrated first.
    The standard error is that of the ``n_outer`` inner averages.
    """
    lam1, lam2 = _check_lambda(lam1), _check_lambda(lam2)
    if n_outer < 2 or n_inner < 1:
        raise ValueError("need n_outer >= 2 and n_inner >= 1")
    if inner not in ("x1", "x2"):
        raise ValueError("inner must be 'x1' or 'x2'")
    grid = require_same_grid(F, h1, h2)
    m = len(F)
    if m == 0:
        return MCEstimate.from_samples(np.zeros(n_outer, complex), rng.seed)
    W1 = (F.atoms * h1.values).reshape(m, -1).T / np.sqrt(lam1)
    W2 = (F.atoms * h2.values).reshape(m, -1).T / np.sqrt(lam2)
    W_in, W_out = (W1, W2) if inner == "x1" else (W2, W1)
    outer = _projections(W_out, grid, rng.child(1), n_outer, workers)
    inner_p = _projections(W_in, grid, rng.child(2), n_outer * n_inner, workers)
    phase = inner_p.reshape(n_outer, n_inner, m) + outer[:, None, :]
    values = (np.exp(1j * phase) @ F.weights).mean(axis=1)
    return MCEstimate.from_samples(values, rng.seed)


def checkpoints(n: int) -> list[int]:
    """Powers of two from 2 below ``n``, followed by ``n``."""
    pts = []
    k = 2
    while k < n:
        pts.append(k)
        k *= 2
    pts.append(n)
    return pts


def running_estimates(values: np.ndarray, seed: int) -> list[MCEstimate]:
    """Estimates from the leading ``k`` samples at each checkpoint ``k``."""
    return [MCEstimate.from_samples(values[:k], seed) for k in checkpoints(len(values))]
