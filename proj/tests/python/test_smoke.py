import json
import math

import pytest

import thermolab as tl


def test_doubling_entropy_is_log2():
    f = tl.load_map("doubling")
    for method in ("preimage", "periodic", "spectral"):
        est = tl.estimate(f, "const:0", method=method)
        assert abs(est["extrapolated"] - math.log(2)) < 1e-3


def test_branch_constant_pressure_closed_form():
    f = tl.load_map("doubling")
    phi = tl.Potential.branch_constant(f, [0.2, -0.3])
    r = tl.cross_validate(f, phi)
    assert r["verdict"]
    assert abs(r["consensus"] - math.log(math.exp(0.2) + math.exp(-0.3))) < 1e-6


def test_map_and_potential_objects():
    f = tl.load_map("doubling")
    assert f(0.75) == pytest.approx(0.5)
    assert f.itinerary(0.3, 3) == [0, 1, 0]
    assert tl.Potential.affine(2.0, 1.0)(0.5) == pytest.approx(2.0)
    g = tl.load_map(json.dumps({"builtin": "logistic", "r": 4.0}))
    assert g.branch_count == 2


def test_periodic_points_count():
    f = tl.load_map("doubling")
    for n in range(1, 8):
        points, _ = tl.periodic_points(f, n)
        assert len(points) == 2**n - 1


def test_scgf_and_rate_of_a_fair_coin():
    f = tl.load_map("doubling")
    t = [-4 + 0.1 * k for k in range(81)]
    t, lam = tl.scgf(f, "const:0", "branch:0,1", t)
    for ti, li in zip(t, lam):
        assert li == pytest.approx(math.log((1 + math.exp(ti)) / 2), abs=1e-9)
    s = [0.3, 0.5, 0.7]
    rate = tl.legendre_rate(t, lam, s)
    for si, ri in zip(s, rate):
        exact = math.log(2) + si * math.log(si) + (1 - si) * math.log(1 - si)
        assert ri == pytest.approx(exact, abs=1e-3)


def test_complex_quadratic_c0():
    est = tl.complex_pressure(0j, method="preimage")
    assert abs(est["extrapolated"] - math.log(2)) < 1e-3


def test_errors_are_typed():
    with pytest.raises(tl.ValidationError):
        tl.load_map("no-such-map")
    with pytest.raises(tl.NumericalError):
        tl.estimate(tl.load_map("logistic:3.5"), "const:0", method="spectral")


def test_run_matches_command_line_report():
    cfg = tl.RunConfig()
    cfg.command = "pressure"
    cfg.potential = "branch:0.2,-0.3"
    code, report, err = tl.run(cfg)
    assert code == 0 and err == ""
    doc = json.loads(report)
    assert doc["command"] == "pressure"
    assert "wall_time_s" not in doc
    cfg.threads = 4
    assert tl.run(cfg)[1] == report
