import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yehfeynman.algebra import FeynmanQ, RealLambda, random_functional, unit_mass
from yehfeynman.errors import DegenerateParameterError
from yehfeynman.feynman import (
    MCEstimate,
    alpha_n,
    checkpoints,
    closed_form_real_lambda,
    feynman_closed_form,
    feynman_integral,
    iterated_closed_form,
    iterated_mc_two_kernels,
    iterated_q_closed_form,
    running_estimates,
    two_kernel_closed_form,
    yeh_wiener_mc,
    yeh_wiener_mc_many,
    yeh_wiener_samples,
)
from yehfeynman.grid import combine_kernels, constant, sample_function
from yehfeynman.kernels import preset
from yehfeynman.sheet import RngStream


def test_unit_atom_closed_forms(grid64):
    one = constant(1.0, grid64)
    F = unit_mass(one)
    assert feynman_closed_form(F, one, 1.0) == pytest.approx(cmath.exp(-0.5j), abs=1e-14)
    assert closed_form_real_lambda(F, one, 1.0) == pytest.approx(math.exp(-0.5), abs=1e-14)
    assert feynman_integral(F, one, FeynmanQ(1.0)) == feynman_closed_form(F, one, 1.0)
    assert feynman_integral(F, one, RealLambda(1.0)) == closed_form_real_lambda(F, one, 1.0)
    with pytest.raises(TypeError):
        feynman_integral(F, one, 1.0)


def test_closed_form_is_unit_modulus_for_single_atom(grid8, gen):
    F = unit_mass(sample_function(lambda s, t: s - t, grid8), 1.0)
    h = sample_function(lambda s, t: 1 + s * t, grid8)
    for q in (0.3, -2.0, 7.0):
        assert abs(feynman_closed_form(F, h, q)) == pytest.approx(1.0, abs=1e-15)


def test_alpha_n_values():
    assert alpha_n([3, -6, 2]) == pytest.approx(1.5, rel=1e-15)
    assert alpha_n([2.0]) == 2.0
    assert alpha_n([1, 1, 1, 1]) == pytest.approx(0.25)


@pytest.mark.parametrize("qs", [[3, -3], [1, -1], [2, 2, -1], [1.5, -3.0, -3.0]])
def test_alpha_n_degenerate(qs):
    with pytest.raises(DegenerateParameterError):
        alpha_n(qs)


@pytest.mark.parametrize("qs", [[], [0, 1], [1, float("inf")]])
def test_alpha_n_invalid(qs):
    with pytest.raises(ValueError):
        alpha_n(qs)


def test_iterated_q_equals_single_at_alpha(grid8, gen):
    F = random_functional(grid8, gen)
    h = sample_function(lambda s, t: np.cos(s) + t, grid8)
    qs = [3.0, -6.0, 2.0]
    assert iterated_q_closed_form(F, h, qs) == pytest.approx(feynman_closed_form(F, h, alpha_n(qs)), abs=1e-14)


def test_iterated_equals_combined_kernel(grid64, gen):
    F = random_functional(grid64, gen)
    H = preset("H4", grid64)
    assert iterated_closed_form(F, H, 0.9) == pytest.approx(
        feynman_closed_form(F, combine_kernels(H), 0.9), abs=1e-14
    )
    with pytest.raises(ValueError):
        iterated_closed_form(F, [], 1.0)


def test_mc_estimate_statistics():
    vals = np.array([1 + 1j, 3 - 1j, 2 + 0j, 2 + 0j])
    est = MCEstimate.from_samples(vals, seed=5)
    assert est.mean == 2 + 0j
    assert est.se_re == pytest.approx(np.std([1, 3, 2, 2], ddof=1) / 2)
    assert est.se_im == pytest.approx(np.std([1, -1, 0, 0], ddof=1) / 2)
    assert est.within(2 + 0j)
    assert not est.within(10 + 0j)
    assert est.to_record()["seed"] == 5
    with pytest.raises(ValueError):
        MCEstimate.from_samples(np.ones(1), 0)


def test_mc_estimate_zero_error():
    est = MCEstimate.from_samples(np.ones(4), 0)
    assert est.z_scores(1.0) == (0.0, 0.0)
    assert est.z_scores(2.0)[0] == np.inf


def test_mc_matches_closed_form(grid8, gen):
    F = random_functional(grid8, gen, n_atoms=4)
    h = sample_function(lambda s, t: 1 + s + t, grid8)
    for lam in (0.5, 2.0):
        est = yeh_wiener_mc(F, h, lam, 20000, RngStream(31))
        assert est.within(closed_form_real_lambda(F, h, lam), k=4.0)


def test_mc_independent_of_workers(grid8, gen):
    F = random_functional(grid8, gen)
    h = constant(1.0, grid8)
    a = yeh_wiener_mc(F, h, 1.0, 3000, RngStream(1), workers=1)
    b = yeh_wiener_mc(F, h, 1.0, 3000, RngStream(1), workers=8)
    assert a == b


def test_shared_sheets_match_single_case(grid8, gen):
    F = random_functional(grid8, gen)
    G = random_functional(grid8, gen)
    h1 = constant(1.0, grid8)
    h2 = sample_function(lambda s, t: s, grid8)
    cases = [(F, h1, 0.5), (G, h2, 1.0), (F, h1, 2.0)]
    many = yeh_wiener_mc_many(cases, 1000, RngStream(2))
    for est, (A, h, lam) in zip(many, cases):
        single = yeh_wiener_mc(A, h, lam, 1000, RngStream(2))
        assert abs(est.mean - single.mean) < 1e-12
    assert yeh_wiener_samples(cases, 10, RngStream(2)).shape == (10, 3)


def test_mc_rejects_bad_arguments(grid8, gen):
    F = random_functional(grid8, gen)
    h = constant(1.0, grid8)
    with pytest.raises(ValueError):
        yeh_wiener_mc(F, h, 0.0, 100, RngStream(0))
    with pytest.raises(ValueError):
        yeh_wiener_mc(F, h, 1.0, 1, RngStream(0))
    with pytest.raises(ValueError):
        yeh_wiener_samples([], 10, RngStream(0))


def test_two_kernel_mc_matches_closed_form(grid8, gen):
    F = random_functional(grid8, gen, n_atoms=3)
    h1 = sample_function(lambda s, t: 1 + s, grid8)
    h2 = sample_function(lambda s, t: np.cos(t), grid8)
    target = two_kernel_closed_form(F, h1, h2, 0.7, 1.4)
    for inner in ("x1", "x2"):
        est = iterated_mc_two_kernels(F, h1, h2, 0.7, 1.4, 4000, 4, RngStream(3), inner=inner)
        # several comparisons per run, so a 4 sigma bound keeps false alarms rare
        assert est.within(target, k=4.0)
    with pytest.raises(ValueError):
        iterated_mc_two_kernels(F, h1, h2, 1, 1, 100, 1, RngStream(3), inner="y")


def test_two_kernel_closed_form_reduces_to_combined(grid8, gen):
    F = random_functional(grid8, gen)
    h1 = sample_function(lambda s, t: s, grid8)
    h2 = sample_function(lambda s, t: t, grid8)
    assert two_kernel_closed_form(F, h1, h2, 1.3, 1.3) == pytest.approx(
        closed_form_real_lambda(F, combine_kernels([h1, h2]), 1.3), abs=1e-14
    )


def test_checkpoints():
    assert checkpoints(10) == [2, 4, 8, 10]
    assert checkpoints(8) == [2, 4, 8]
    assert len(checkpoints(10_000)) == 14


def test_running_estimates_tail_is_full_estimate():
    vals = np.random.default_rng(0).normal(size=100) + 0j
    runs = running_estimates(vals, 0)
    assert [r.n for r in runs] == checkpoints(100)
    assert runs[-1] == MCEstimate.from_samples(vals, 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.1, 10).flatmap(lambda q: st.sampled_from([q, -q])), min_size=2, max_size=6))
def test_alpha_n_composes(qs):
    try:
        whole = alpha_n(qs)
        nested = alpha_n([alpha_n(qs[:-1]), qs[-1]])
    except DegenerateParameterError:
        return
    assert nested == pytest.approx(whole, rel=1e-9)
