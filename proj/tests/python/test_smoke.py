import json
import math

import numpy as np
import pytest

import psdocalc as pc


@pytest.fixture(scope="module")
def cycle():
    return pc.Model("cycle", 32)


def test_cycle_spectrum(cycle):
    k = np.arange(32)
    ref = np.sort(2 - 2 * np.cos(2 * np.pi * k / 32))
    assert np.allclose(cycle.eigenvalues, ref, atol=1e-12)
    assert cycle.dist(0, 16) == 16
    assert cycle.ball(0, 2.0) == [0, 1, 31]


def test_multiplier_matches_semigroup(cycle):
    f = np.random.default_rng(1).uniform(-1, 1, 32)
    a = cycle.semigroup(0.5, f)
    b = cycle.multiplier(lambda x: math.exp(-0.5 * x), f)
    assert np.array_equal(a, b)


def test_identity_symbol(cycle):
    f = np.random.default_rng(2).uniform(-1, 1, 32)
    one = pc.constant_symbol(1.0)
    assert np.allclose(pc.apply(one, cycle, f), f)
    assert pc.opnorm(one, cycle)["value"] == pytest.approx(1.0)
    assert pc.mapping_test(one, cycle, 1.0)["value"] == pytest.approx(1.0)


def test_expression_symbol(cycle):
    s = pc.expression_symbol("cos(2*pi*x0) * xi/(1+xi)", cycle, delta=0.5)
    assert s.params == (0.0, 1.0, 0.5, 2.0)
    K = pc.kernel(s, cycle)
    f = np.random.default_rng(3).uniform(-1, 1, 32)
    assert np.allclose(K @ f, pc.apply(s, cycle, f))
    assert pc.adjoint_defect(s, cycle)["value"] > 0
    assert pc.adjoint_defect(pc.multiplier_symbol(lambda x: x / (1 + x)), cycle)["value"] < 1e-12


def test_errors(cycle):
    with pytest.raises(pc.InvalidArgument, match="offset"):
        pc.parse_expression("1 + * 2")
    with pytest.raises(ValueError):
        pc.Model("moebius", 8)
    with pytest.raises(ValueError):
        pc.builtin_symbol("nope", cycle)


def test_bmo_and_sobolev(cycle):
    b = pc.bmo_norm(cycle, np.full(32, 3.0))
    assert b["norm"] < 1e-12
    assert b["M"] == 2
    f = np.random.default_rng(4).uniform(-1, 1, 32)
    assert pc.sobolev_norm(cycle, f, 0.0) == pytest.approx(np.linalg.norm(f))
    assert pc.sobolev_norm(cycle, f, 1.0) > pc.sobolev_norm(cycle, f, 0.0)


def test_doubling():
    assert pc.Model("sierpinski", 5).doubling()["n"] == pytest.approx(math.log2(3), abs=0.15)


def test_run_and_report(tmp_path):
    cfg = json.dumps({"space": {"kind": "cycle", "size": 64}})
    res = pc.run(cfg, tmp_path / "out")
    assert res["passed"]
    assert "opnorm.csv" in res["files"]
    assert pc.report(tmp_path / "out")
    assert pc.config_hash(cfg) == pc.config_hash(cfg)
    assert len(pc.recipes()) == 10
