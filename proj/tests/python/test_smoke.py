import json
import math
from pathlib import Path

import pytest

import hodge_moduli as hm

EXAMPLES = Path(__file__).resolve().parents[2] / "data" / "examples"


def dims(W):
    return {p["index"]: p["dim"] for p in W["pieces"]}


def test_weight_filtration_j3():
    r = hm.weight_filtration([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert r["verified"]
    d = dims(r["W"])
    assert d[-2] == 1 and d[-1] == 1 and d[0] == 2 and d[1] == 2 and d[2] == 3


def test_weight_filtration_centered():
    r = hm.weight_filtration([[0, 1], [0, 0]], center=3)
    d = dims(r["W"])
    assert r["verified"] and d[2] == 1 and d[4] == 2


def test_weight_filtration_rejects_non_nilpotent():
    with pytest.raises(hm.InputError):
        hm.weight_filtration([[1, 0], [0, 0]])


def test_malformed_json_text():
    with pytest.raises(ValueError):
        hm.weight_filtration("[[0, 1], [0")


def test_hodge_verify_examples():
    good = json.loads((EXAMPLES / "elliptic.json").read_text())
    bad = json.loads((EXAMPLES / "not_polarized.json").read_text())
    assert hm.verify_hodge(good)["polarized"]
    assert not hm.verify_hodge(bad)["polarized"]


def test_limit_mhs():
    m = json.loads((EXAMPLES / "elliptic_limit_mhs.json").read_text())
    assert hm.check_mhs(m)["mhs"]


def test_cone_region():
    r = hm.classify_cone_region([1e6, 100.0], [30.0, 5.0])
    assert r["certified"] and not r["base"]
    assert hm.classify_cone_region([2.0, 1.5], [30.0, 5.0])["base"]


def test_rationality():
    r = hm.rationality(0.0833331, max_den=60)
    assert r["nearest"] == "1/12" and r["verdict"] == "rational"
    assert hm.rationality(0.3183099, max_den=50, tol=1e-6)["verdict"] != "rational"


def test_modular_integral_is_one_twelfth():
    r = hm.integrate("upper-half-plane", "c1-hodge:1", precision=128)
    assert abs(float(r["limit"]) - 1 / 12) < 1e-6


def test_conifold_monodromy():
    r = hm.monodromy(point="conifold")
    assert r["unipotent"] and r["rank_T_minus_I"] == 1
    assert r["rounding_residual"] < 1e-30


def test_poincare_log_mass():
    assert hm.poincare_log_mass(0.1) == pytest.approx(2 * math.log(2))


def test_versions():
    v = hm.versions()
    assert "gmp" in v and "mpfr" in v
