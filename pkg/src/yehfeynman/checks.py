"""Executable identity checks with structured pass/fail reports.

Exact checks compare finite sums of exponentials at a handful of sample
paths (the zero path plus sampled sheets); both sides are the same algebraic
object, so agreement is expected up to rounding. Statistical checks compare a
Monte Carlo estimate with a closed form in units of its standard error.

Every exact check takes ``perturb=(index, delta)``, which rotates the phase of
one weight on the left-hand side before comparing. It exists so tests can
confirm that the comparison is not vacuous.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import algebra as alg
from .algebra import CylinderFunctional, gcp, gfyft, scaled_product, with_phase_shift
from .errors import HypothesisError
from .feynman import (
    alpha_n,
    closed_form_real_lambda,
    feynman_closed_form,
    iterated_closed_form,
    iterated_mc_two_kernels,
    yeh_wiener_mc,
)
from .grid import GridFunction, GridSpec, combine_kernels
from .sheet import RngStream, SheetPath, sample_sheets, zero_path

__all__ = [
    "CheckReport",
    "EXACT_THRESHOLD",
    "HYPOTHESIS_TOL",
    "SIGMA_THRESHOLD",
    "y_samples",
    "check_fubini",
    "check_transform_q_composition",
    "check_transform_kernel_composition",
    "check_transform_mixed_composition",
    "check_relationship_I",
    "check_relationship_I_extended",
    "check_relationship_II",
    "check_relationship_II_extended",
    "check_relationship_II_dual_families",
    "check_mc_consistency",
    "check_two_stage_fubini",
    "SuiteContext",
    "CHECKS",
    "run_checks",
]

EXACT_THRESHOLD = 1e-10
FUBINI_THRESHOLD = 1e-12
HYPOTHESIS_TOL = 1e-10
SIGMA_THRESHOLD = 3.0

# lanes of the suite stream; lane 0 and 1-2 belong to the MC routines
LANE_SINGLE_STAGE = 3
LANE_Y = 50
LANE_FUNCTIONALS = 100


@dataclass
class CheckReport:
    name: str
    mode: str
    lhs: np.ndarray
    rhs: np.ndarray
    max_abs_diff: float
    threshold: float
    passed: bool
    metadata: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        def cplx(a):
            return [[float(z.real), float(z.imag)] for z in np.atleast_1d(a)]

        return {
            "name": self.name,
            "mode": self.mode,
            "passed": bool(self.passed),
            "max_abs_diff": float(self.max_abs_diff),
            "threshold": float(self.threshold),
            "lhs": cplx(self.lhs),
            "rhs": cplx(self.rhs),
            "metadata": _jsonable(self.metadata),
            "error": self.error,
        }

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary(self) -> str:
        status = "PASS" if self.passed else ("ERROR" if self.error else "FAIL")
        return f"{status} {self.name} [{self.mode}] diff={self.max_abs_diff:.3e} thr={self.threshold:.1e}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def y_samples(grid: GridSpec, rng: RngStream, n: int = 10) -> list[SheetPath]:
    """The zero path followed by ``n`` sheets from lane ``LANE_Y`` of ``rng``."""
    return [zero_path(grid)] + sample_sheets(grid, rng.child(LANE_Y), n)


def _values(F: CylinderFunctional, ys: Sequence[SheetPath], scale: float = 1.0) -> np.ndarray:
    inc = np.stack([y.increments for y in ys]) * scale
    return alg.evaluate_many(F, inc)


def _perturbed(F: CylinderFunctional, perturb) -> CylinderFunctional:
    if perturb is None:
        return F
    index, delta = perturb
    return with_phase_shift(F, index, delta)


def _exact_report(name, forms, threshold, metadata) -> CheckReport:
    forms = [np.atleast_1d(np.asarray(f, dtype=complex)) for f in forms]
    ref = forms[-1]
    diffs = [float(np.max(np.abs(f - ref))) for f in forms[:-1]]
    worst = max(diffs)
    metadata = dict(metadata)
    if len(forms) > 2:
        metadata["form_diffs"] = diffs
    return CheckReport(name, "exact", forms[0], ref, worst, threshold, worst <= threshold, metadata)


def _require(a: np.ndarray, b: np.ndarray, what: str) -> None:
    gap = float(np.max(np.abs(a - b)))
    if gap > HYPOTHESIS_TOL:
        raise HypothesisError(f"{what} fails on the grid (max gap {gap:.3e})")


def _iterate(F, kernels, q):
    for h in kernels:
        F = gfyft(F, h, q)
    return F


def check_fubini(F, H: Sequence[GridFunction], q: float, perturb=None) -> CheckReport:
    """Iterated integral over ``H`` against the single integral with kernel ``s(H)``."""
    lhs = iterated_closed_form(_perturbed(F, perturb), H, q)
    rhs = feynman_closed_form(F, combine_kernels(H), q)
    return _exact_report("fubini", [lhs, rhs], FUBINI_THRESHOLD, {"q": q, "n_kernels": len(H)})


def check_transform_q_composition(F, h, qs, ys, perturb=None) -> CheckReport:
    a = alpha_n(qs)
    lhs = F
    for q in qs:
        lhs = gfyft(lhs, h, q)
    lhs = _perturbed(lhs, perturb)
    rhs = gfyft(F, h, a)
    return _exact_report(
        "transform_q", [_values(lhs, ys), _values(rhs, ys)], EXACT_THRESHOLD,
        {"qs": list(qs), "alpha_n": a, "n_y": len(ys)},
    )


def check_transform_kernel_composition(F, H, q, ys, perturb=None) -> CheckReport:
    lhs = _perturbed(_iterate(F, H, q), perturb)
    rhs = gfyft(F, combine_kernels(H), q)
    return _exact_report(
        "transform_kernel", [_values(lhs, ys), _values(rhs, ys)], EXACT_THRESHOLD,
        {"q": q, "n_kernels": len(H), "n_y": len(ys)},
    )


def check_transform_mixed_composition(F, H1, H2, q1, q2, ys, perturb=None) -> CheckReport:
    """Two kernel families with equal combinations at two parameters ``q1, q2``."""
    s1, s2 = combine_kernels(H1), combine_kernels(H2)
    _require(s1.values, s2.values, "s(H1) = s(H2)")
    if q1 + q2 == 0:
        raise ValueError("q1 + q2 must be nonzero")
    first = _iterate(_iterate(F, H1, q1), H2, q2)
    second = _iterate(gfyft(F, s1, q1), H2, q2)
    third = gfyft(gfyft(F, s1, q1), s2, q2)
    fourth = gfyft(F, s1, q1 * q2 / (q1 + q2))
    forms = [_perturbed(first, perturb), second, third, fourth]
    return _exact_report(
        "transform_mixed", [_values(G, ys) for G in forms], EXACT_THRESHOLD,
        {"q1": q1, "q2": q2, "n_y": len(ys)},
    )


def _require_square(h: GridFunction, k1: GridFunction, k2: GridFunction, what="h^2 = k1 k2"):
    _require(h.values**2, k1.values * k2.values, what)


def check_relationship_I(F, G, h, k1, k2, q, ys, perturb=None) -> CheckReport:
    """Transform of the convolution against the product of transforms at ``y / sqrt 2``."""
    _require_square(h, k1, k2)
    lhs = _perturbed(gfyft(gcp(F, G, k1, k2, q), h, q), perturb)
    r = 1.0 / np.sqrt(2.0)
    TF = gfyft(F, combine_kernels([h, k1]) * r, q)
    TG = gfyft(G, combine_kernels([h, k2]) * r, q)
    rhs = _values(TF, ys, r) * _values(TG, ys, r)
    return _exact_report(
        "relationship_I", [_values(lhs, ys), rhs], EXACT_THRESHOLD, {"q": q, "n_y": len(ys)}
    )


def check_relationship_I_extended(F, G, H, k1, k2, q, ys, perturb=None) -> CheckReport:
    """Iterated transforms over ``H`` of the convolution, with ``s(H)^2 = k1 k2``."""
    sH = combine_kernels(H)
    _require_square(sH, k1, k2, "s(H)^2 = k1 k2")
    conv = gcp(F, G, k1, k2, q)
    r = 1.0 / np.sqrt(2.0)
    first = _perturbed(_iterate(conv, H, q), perturb)
    second = gfyft(conv, sH, q)
    TF = gfyft(F, combine_kernels([*H, k1]) * r, q)
    TG = gfyft(G, combine_kernels([*H, k2]) * r, q)
    third = _values(TF, ys, r) * _values(TG, ys, r)
    return _exact_report(
        "relationship_I_extended", [_values(first, ys), _values(second, ys), third],
        EXACT_THRESHOLD, {"q": q, "n_kernels": len(H), "n_y": len(ys)},
    )


def check_relationship_II(F, G, h, k1, k2, q, ys, perturb=None) -> CheckReport:
    """Convolution (at ``-q``) of transforms against the transform of ``F(./sqrt2) G(./sqrt2)``."""
    _require_square(h, k1, k2)
    r = 1.0 / np.sqrt(2.0)
    TF = gfyft(F, combine_kernels([h, k1]) * r, q)
    TG = gfyft(G, combine_kernels([h, k2]) * r, q)
    lhs = _perturbed(gcp(TF, TG, k1, k2, -q), perturb)
    rhs = gfyft(scaled_product(F, G), h, q)
    return _exact_report(
        "relationship_II", [_values(lhs, ys), _values(rhs, ys)], EXACT_THRESHOLD,
        {"q": q, "n_y": len(ys)},
    )


def check_relationship_II_extended(F, G, H, k1, k2, q, ys, perturb=None) -> CheckReport:
    """Three-form chain for a kernel family ``H`` with ``s(H)^2 = k1 k2``."""
    sH = combine_kernels(H)
    _require_square(sH, k1, k2, "s(H)^2 = k1 k2")
    r = 1.0 / np.sqrt(2.0)
    Hs = [h * r for h in H]
    first = gcp(gfyft(_iterate(F, Hs, q), k1 * r, q), gfyft(_iterate(G, Hs, q), k2 * r, q), k1, k2, -q)
    second = gcp(
        gfyft(F, combine_kernels([*H, k1]) * r, q),
        gfyft(G, combine_kernels([*H, k2]) * r, q),
        k1, k2, -q,
    )
    third = gfyft(scaled_product(F, G), sH, q)
    forms = [_perturbed(first, perturb), second, third]
    return _exact_report(
        "relationship_II_extended", [_values(X, ys) for X in forms], EXACT_THRESHOLD,
        {"q": q, "n_kernels": len(H), "n_y": len(ys)},
    )


def check_relationship_II_dual_families(F, G, h, K1, K2, q, ys, perturb=None) -> CheckReport:
    """Four-form chain with kernel families ``K1, K2`` and ``h^2 = s(K1) s(K2)``."""
    s1, s2 = combine_kernels(K1), combine_kernels(K2)
    _require_square(h, s1, s2, "h^2 = s(K1) s(K2)")
    r = 1.0 / np.sqrt(2.0)
    hr = h * r
    first = gcp(
        gfyft(_iterate(F, [k * r for k in K1], q), hr, q),
        gfyft(_iterate(G, [k * r for k in K2], q), hr, q),
        s1, s2, -q,
    )
    second = gcp(gfyft(gfyft(F, s1 * r, q), hr, q), gfyft(gfyft(G, s2 * r, q), hr, q), s1, s2, -q)
    third = gcp(
        gfyft(F, combine_kernels([h, s1]) * r, q),
        gfyft(G, combine_kernels([h, s2]) * r, q),
        s1, s2, -q,
    )
    fourth = gfyft(scaled_product(F, G), h, q)
    forms = [_perturbed(first, perturb), second, third, fourth]
    return _exact_report(
        "relationship_II_dual", [_values(X, ys) for X in forms], EXACT_THRESHOLD,
        {"q": q, "n_K1": len(K1), "n_K2": len(K2), "n_y": len(ys)},
    )


def check_mc_consistency(F, h, lam, n, rng, oracle: complex | None = None, workers: int = 1) -> CheckReport:
    """Monte Carlo ``J_F(h; lam)`` against its closed form, componentwise in sigma units.

    ``oracle`` replaces the closed form; it exists for negative controls.
    """
    est = yeh_wiener_mc(F, h, lam, n, rng, workers)
    target = closed_form_real_lambda(F, h, lam) if oracle is None else complex(oracle)
    z = max(est.z_scores(target))
    return CheckReport(
        "mc_consistency", "statistical", np.array([est.mean]), np.array([target]),
        z, SIGMA_THRESHOLD, z <= SIGMA_THRESHOLD,
        {"lambda": lam, "estimate": est.to_record(), "abs_diff": abs(est.mean - target)},
    )


def check_two_stage_fubini(F, h1, h2, lam, n_outer, rng, n_inner: int = 1, workers: int = 1) -> CheckReport:
    """Two-stage estimate over ``Y_h1, Y_h2`` against one stage under ``s(h1, h2)``."""
    nested = iterated_mc_two_kernels(F, h1, h2, lam, lam, n_outer, n_inner, rng, workers=workers)
    single = yeh_wiener_mc(
        F, combine_kernels([h1, h2]), lam, n_outer, rng.child(LANE_SINGLE_STAGE), workers
    )
    z = max(nested.z_scores(single.mean, single.std_error))
    return CheckReport(
        "two_stage_fubini", "statistical", np.array([nested.mean]), np.array([single.mean]),
        z, SIGMA_THRESHOLD, z <= SIGMA_THRESHOLD,
        {"lambda": lam, "nested": nested.to_record(), "single": single.to_record()},
    )


@dataclass
class SuiteContext:
    """Inputs shared by the named suite checks."""

    grid: GridSpec
    F: CylinderFunctional
    G: CylinderFunctional
    kernels: list
    q: float
    lam: float
    n_samples: int
    rng: RngStream
    n_y: int = 10
    workers: int = 1

    def __post_init__(self):
        self.ys = y_samples(self.grid, self.rng, self.n_y)

    def pair(self):
        """``(h, k1, k2)`` from the configured kernels."""
        K = self.kernels
        if len(K) == 3:
            k1, k2, h = K
            return h, k1, k2
        h = K[0] if len(K) == 1 else combine_kernels(K)
        return h, h, h


def _suite_relationship_II_extended(c: SuiteContext):
    sH = combine_kernels(c.kernels)
    return check_relationship_II_extended(c.F, c.G, c.kernels, sH * 2.0, sH * 0.5, c.q, c.ys)


def _suite_two_stage(c: SuiteContext):
    h1 = c.kernels[0]
    h2 = c.kernels[1] if len(c.kernels) > 1 else c.kernels[0]
    return check_two_stage_fubini(c.F, h1, h2, c.lam, c.n_samples, c.rng, workers=c.workers)


CHECKS: dict[str, Callable[[SuiteContext], CheckReport]] = {
    "fubini": lambda c: check_fubini(c.F, c.kernels, c.q),
    "transform_inverse": lambda c: _exact_report(
        "transform_inverse",
        [gfyft(gfyft(c.F, combine_kernels(c.kernels), c.q), combine_kernels(c.kernels), -c.q).weights,
         c.F.weights],
        1e-14, {"q": c.q},
    ),
    "transform_q": lambda c: check_transform_q_composition(
        c.F, combine_kernels(c.kernels), (3 * c.q, -6 * c.q, 2 * c.q), c.ys
    ),
    "transform_kernel": lambda c: check_transform_kernel_composition(c.F, c.kernels, c.q, c.ys),
    "transform_mixed": lambda c: check_transform_mixed_composition(
        c.F, c.kernels, [combine_kernels(c.kernels)], c.q, 2 * c.q, c.ys
    ),
    "relationship_I": lambda c: check_relationship_I(c.F, c.G, *c.pair(), c.q, c.ys),
    "relationship_I_extended": lambda c: check_relationship_I_extended(
        c.F, c.G, c.kernels, combine_kernels(c.kernels), combine_kernels(c.kernels), c.q, c.ys
    ),
    "relationship_II": lambda c: check_relationship_II(c.F, c.G, *c.pair(), c.q, c.ys),
    "relationship_II_extended": _suite_relationship_II_extended,
    "relationship_II_dual": lambda c: check_relationship_II_dual_families(
        c.F, c.G, combine_kernels(c.kernels), c.kernels, c.kernels, c.q, c.ys
    ),
    "mc_consistency": lambda c: check_mc_consistency(
        c.F, combine_kernels(c.kernels), c.lam, c.n_samples, c.rng, workers=c.workers
    ),
    "two_stage_fubini": _suite_two_stage,
}


def run_checks(names: Sequence[str], ctx: SuiteContext) -> list[CheckReport]:
    """Run named checks in order; hypothesis and parameter failures become error reports."""
    reports = []
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}; known: {sorted(CHECKS)}")
        try:
            reports.append(CHECKS[name](ctx))
        except (HypothesisError, ValueError) as exc:
            reports.append(
                CheckReport(name, "exact", np.array([]), np.array([]), float("inf"), 0.0, False,
                            {}, error=f"{type(exc).__name__}: {exc}")
            )
    return reports
