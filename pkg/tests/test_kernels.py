import numpy as np
import pytest

from yehfeynman.grid import make_grid
from yehfeynman.kernels import PRESETS, expression_function, parse_expression, preset, resolve_kernels


def test_expression_evaluates():
    f = expression_function("sin(s)^2 * cos(t) + exp(-s*t) + 2**3")
    s, t = np.array([0.3, 1.1]), np.array([0.7, 0.2])
    np.testing.assert_allclose(f(s, t), np.sin(s) ** 2 * np.cos(t) + np.exp(-s * t) + 8)


def test_expression_uses_extents():
    f = expression_function("s / S + t / T", S=2.0, T=4.0)
    assert f(1.0, 2.0) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", ["__import__('os')", "s.real", "lambda: 1", "foo(s)", "s[0]", "sin"])
def test_expression_rejects(bad):
    with pytest.raises(ValueError):
        expression_function(bad)(0.1, 0.2)


def test_parse_error():
    with pytest.raises(ValueError):
        parse_expression("s +* t")


def test_presets_shapes():
    g = make_grid(1, 1, 16, 16)
    assert [len(preset(name, g)) for name in ["one", "H4", "trig-pair", "k1k2-pair"]] == [1, 4, 2, 3]
    with pytest.raises(ValueError):
        preset("nope", g)


def test_k1k2_pair_satisfies_square_relation():
    g = make_grid(1, 1, 64, 64)
    k1, k2, h = preset("k1k2-pair", g)
    assert np.max(np.abs(k1.values * k2.values - h.values**2)) <= 1e-12


def test_resolve_mixes_presets_and_expressions():
    g = make_grid(1, 1, 4, 4)
    ks = resolve_kernels(["one", "s*t"], g)
    assert len(ks) == 2
    assert set(PRESETS) == {"one", "H4", "trig-pair", "k1k2-pair"}
