"""Smoke test of the Python bindings; scipy serves as the reference."""

import json

import pytest
from scipy import special

import diskscat_py as ds


def test_cylinder_against_scipy():
    for n in (0, 1, 5, 30):
        for x in (0.3, 2.0, 17.5, 120.0):
            j, jp, y, yp = ds.cylinder(n, x)
            assert j == pytest.approx(special.jv(n, x), rel=1e-12, abs=1e-300)
            assert jp == pytest.approx(special.jvp(n, x), rel=1e-12, abs=1e-300)
            assert y == pytest.approx(special.yv(n, x), rel=1e-12)
            assert yp == pytest.approx(special.yvp(n, x), rel=1e-12)


def test_zeros_against_scipy():
    t = ds.zeros(3, 4)
    assert t["j"] == pytest.approx(list(special.jn_zeros(3, 4)), rel=1e-13)
    assert t["jp"] == pytest.approx(list(special.jnp_zeros(3, 4)), rel=1e-13)
    assert t["y1"] == pytest.approx(special.yn_zeros(3, 1)[0], rel=1e-13)


def test_reflection_against_scipy():
    n, lam, x = 4, 2.5, 1.7
    re = special.jvp(n, x) * special.jv(n, lam * x) - lam * special.jvp(n, lam * x) * special.jv(n, x)
    im = special.yvp(n, x) * special.jv(n, lam * x) - lam * special.jvp(n, lam * x) * special.yv(n, x)
    want = -re / complex(re, im)
    assert abs(ds.reflection(n, lam, x) - want) < 1e-12


def test_quasi_resonances():
    recs = ds.quasi_resonances(30, 2.0)
    assert len(recs) == 8
    assert recs[0]["location"] == pytest.approx(17.4211682, abs=1e-6)
    assert recs[-1]["location"] == pytest.approx(31.4683226, abs=1e-6)
    assert ds.quasi_resonances(5, 1.001) == []


def test_trace_and_norms():
    t = ds.field_trace("scattered", 2.0, 0.5, 1.5, modes={2: 1 + 0j, -1: 0.5j})
    assert set(t.coefficients) == {-1, 2}
    assert t.h_sigma_star(0.0) <= t.h_sigma(0.0)
    assert ds.n_script({1: 1 + 0j}, 0.0) > 0
    with pytest.raises(ValueError):
        ds.field_trace("sideways", 2.0, 0.5, 0.3)


def test_check_and_sweep():
    c = ds.check("prop-estimate5half", part="upper", order=4, oeps=2.5)
    assert c["pass"] and c["margin"] >= 0
    r = ds.sweep("prop-r0", seed=7, samples=5)
    assert r["summary"]["failures"] == 0 and len(r["checks"]) == 5
    assert "thm-os-ls" in ds.statements()
    with pytest.raises(ValueError):
        ds.check("thm-os-xx")


def test_cli_in_process():
    code, out, _ = ds.run_cli(["resonances", "--n", "30", "--lambda", "2", "--format", "json"])
    assert code == 0
    assert len(json.loads(out)["data"]) == 8
    code, _, err = ds.run_cli(["exclusions", "--n", "3", "--tau", "0.5", "--lambda", "20"])
    assert code == 2 and "tau" in err


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
