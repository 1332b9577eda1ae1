import json

import numpy as np
import pytest

from yehfeynman.algebra import random_functional
from yehfeynman.checks import (
    CHECKS,
    CheckReport,
    SuiteContext,
    check_fubini,
    check_mc_consistency,
    check_relationship_I,
    check_relationship_I_extended,
    check_relationship_II,
    check_relationship_II_dual_families,
    check_relationship_II_extended,
    check_transform_kernel_composition,
    check_transform_mixed_composition,
    check_transform_q_composition,
    check_two_stage_fubini,
    run_checks,
    y_samples,
)
from yehfeynman.errors import HypothesisError
from yehfeynman.grid import GridFunction, combine_kernels, make_grid, sample_function
from yehfeynman.sheet import RngStream

GRID = make_grid(1, 1, 8, 8)
Q = 0.8


def _kernel(seed):
    return GridFunction(GRID, np.random.default_rng(seed).uniform(0.3, 1.5, GRID.shape))


@pytest.fixture(scope="module")
def setup():
    gen = np.random.default_rng(77)
    F = random_functional(GRID, gen, n_atoms=3)
    G = random_functional(GRID, gen, n_atoms=4)
    ys = y_samples(GRID, RngStream(5), 10)
    H = [_kernel(k) for k in range(3)]
    sH = combine_kernels(H)
    k1 = _kernel(10)
    h = _kernel(11)
    K1 = [_kernel(20), _kernel(21)]
    K2 = [_kernel(22)]
    hd = (combine_kernels(K1) * combine_kernels(K2)) ** 0.5
    return {
        "F": F, "G": G, "ys": ys, "H": H,
        # h^2 = k1 k2 and s(H)^2 = k1 (s(H)^2 / k1)
        "pair": (h, k1, h * h / k1),
        "ext": (sH, k1, sH * sH / k1),
        "dual": (hd, K1, K2),
    }


def exact_cases(c):
    F, G, ys, H = c["F"], c["G"], c["ys"], c["H"]
    h, k1, k2 = c["pair"]
    _, e1, e2 = c["ext"]
    hd, K1, K2 = c["dual"]
    sH = combine_kernels(H)
    return {
        "fubini": lambda p: check_fubini(F, H, Q, perturb=p),
        "transform_q": lambda p: check_transform_q_composition(F, sH, (3, -6, 2), ys, perturb=p),
        "transform_kernel": lambda p: check_transform_kernel_composition(F, H, Q, ys, perturb=p),
        "transform_mixed": lambda p: check_transform_mixed_composition(F, H, [sH], Q, 2.5, ys, perturb=p),
        "relationship_I": lambda p: check_relationship_I(F, G, h, k1, k2, Q, ys, perturb=p),
        "relationship_I_extended": lambda p: check_relationship_I_extended(F, G, H, e1, e2, Q, ys, perturb=p),
        "relationship_II": lambda p: check_relationship_II(F, G, h, k1, k2, Q, ys, perturb=p),
        "relationship_II_extended": lambda p: check_relationship_II_extended(F, G, H, e1, e2, Q, ys, perturb=p),
        "relationship_II_dual": lambda p: check_relationship_II_dual_families(F, G, hd, K1, K2, Q, ys, perturb=p),
    }


NAMES = [
    "fubini", "transform_q", "transform_kernel", "transform_mixed", "relationship_I",
    "relationship_I_extended", "relationship_II", "relationship_II_extended", "relationship_II_dual",
]


@pytest.mark.parametrize("name", NAMES)
def test_exact_check_passes(setup, name):
    r = exact_cases(setup)[name](None)
    assert r.passed, r.summary()
    assert r.mode == "exact"
    assert r.max_abs_diff <= r.threshold


@pytest.mark.parametrize("name", NAMES)
def test_exact_check_detects_phase_perturbation(setup, name):
    r = exact_cases(setup)[name]((0, 1e-6))
    assert not r.passed
    assert r.max_abs_diff > r.threshold


def test_relationships_reject_unmatched_kernels(setup):
    F, G, ys = setup["F"], setup["G"], setup["ys"]
    h, k1, _ = setup["pair"]
    for check in (check_relationship_I, check_relationship_II):
        with pytest.raises(HypothesisError):
            check(F, G, h, k1, k1 * 2.0, Q, ys)
    with pytest.raises(HypothesisError):
        check_relationship_I_extended(F, G, setup["H"], k1, k1, Q, ys)
    with pytest.raises(HypothesisError):
        check_relationship_II_dual_families(F, G, h, [k1], [k1], Q, ys)
    with pytest.raises(HypothesisError):
        check_transform_mixed_composition(F, [h], [k1], Q, Q, ys)


def test_mixed_rejects_cancelling_parameters(setup):
    with pytest.raises(ValueError):
        check_transform_mixed_composition(setup["F"], setup["H"], setup["H"], 1.0, -1.0, setup["ys"])


def test_degenerate_q_sequence_rejected(setup):
    with pytest.raises(ValueError):
        check_transform_q_composition(setup["F"], setup["H"][0], (1, -1), setup["ys"])


def test_mc_consistency_and_negative_control(setup):
    F = setup["F"]
    h = setup["H"][0]
    ok = check_mc_consistency(F, h, 1.0, 20000, RngStream(3))
    assert ok.mode == "statistical"
    assert ok.passed, ok.summary()
    est = ok.metadata["estimate"]
    shifted = ok.rhs[0] + 10 * est["se_re"]
    bad = check_mc_consistency(F, h, 1.0, 20000, RngStream(3), oracle=shifted)
    assert not bad.passed
    assert bad.max_abs_diff > 9


def test_two_stage_fubini_passes(setup):
    r = check_two_stage_fubini(setup["F"], setup["H"][0], setup["H"][1], 1.0, 5000, RngStream(4))
    assert r.passed, r.summary()


def test_report_serialises(setup):
    r = exact_cases(setup)["fubini"](None)
    doc = json.loads(r.to_line())
    assert doc["name"] == "fubini" and doc["passed"] is True
    assert len(doc["lhs"][0]) == 2
    assert r.summary().startswith("PASS fubini")
    err = CheckReport("x", "exact", np.array([]), np.array([]), np.inf, 0.0, False, error="boom")
    assert err.summary().startswith("ERROR")


def test_suite_registry_runs_everything():
    gen = np.random.default_rng(1)
    F = random_functional(GRID, gen, n_atoms=2)
    G = random_functional(GRID, gen, n_atoms=2)
    one = [sample_function(lambda s, t: 1.0 + 0 * s, GRID)]
    ctx = SuiteContext(GRID, F, G, one, 1.0, 1.0, 2000, RngStream(0))
    reports = run_checks(list(CHECKS), ctx)
    assert [r.name for r in reports] == list(CHECKS)
    assert all(r.passed for r in reports), [r.summary() for r in reports if not r.passed]
    with pytest.raises(KeyError):
        run_checks(["nope"], ctx)


def test_suite_reports_hypothesis_failures_as_errors():
    gen = np.random.default_rng(1)
    F = random_functional(GRID, gen, n_atoms=2)
    k = [_kernel(1), _kernel(2), _kernel(3)]
    ctx = SuiteContext(GRID, F, F, k, 1.0, 1.0, 100, RngStream(0))
    (r,) = run_checks(["relationship_I"], ctx)
    assert not r.passed and r.error.startswith("HypothesisError")
