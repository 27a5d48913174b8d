import json

import pytest

from tamarilab import closed_form as cf
from tamarilab.exactnum import MultiPoly, TruncSeries


def test_contact_series_parametrization():
    r = cf.verify_F(20)
    assert r.passed
    # composed with t(z) the count series starts 1, 1, 0, -2
    assert r["leading_terms"] == ["1", "1", "0", "-2"]


def test_upper_height_parametrization():
    r = cf.verify_H(12)
    assert r.passed
    assert r["leading_terms"][:2] == ["1", "s + 2"]
    assert r["round_trip_order"] == 11


def test_upper_kernel_root_germ():
    U = cf.upper_kernel_root(4)
    assert U[0] == MultiPoly.const(0)
    assert U[1] == MultiPoly.var("s")


def test_lower_height_annihilator():
    r = cf.verify_G_annihilator(20)
    assert r.passed
    assert r["leading_terms"][0] == "1"


def test_mixed_parametrization_picks_the_germ():
    r = cf.verify_M(15)
    assert r.passed
    assert r["germ"] == "z/w^2"
    assert r["germs"]["z/w"].startswith("rejected")
    assert r["leading_terms"][1] == "1"


def test_kernel_roots_and_singularity():
    r = cf.verify_kernel_roots(10)
    assert r.passed
    assert r["lower_root_terms"] == ["0", "1", "v + 3"]
    assert r["mixed_root_terms"][1] == "w"
    assert r["rho"] == "27/256"


def test_discrepancy_is_located():
    residual = TruncSeries("z", 5, [0, 0, 0, MultiPoly({(2, 1): 7}, ("s", "w"))])
    bad = cf.first_discrepancy(residual)
    assert bad == {"order": 3, "monomial": "s^2*w", "coefficient": "7"}
    assert cf.first_discrepancy(TruncSeries("z", 5, [])) is None


def test_corrupted_closed_form_fails():
    # perturbing the printed annihilator must break the residual check
    original = cf.G_ANNIHILATOR
    try:
        cf.G_ANNIHILATOR = original + "+z^7"
        r = cf.verify_G_annihilator(10)
    finally:
        cf.G_ANNIHILATOR = original
    assert not r.passed
    assert r["discrepancy"]["order"] == 7


def test_report_json():
    r = cf.verify_F(6, bivariate_order=4)
    data = json.loads(r.to_json())
    assert data["check"] == "F" and data["passed"] is True and data["discrepancy"] is None


@pytest.mark.parametrize("name", list(cf.CHECKS))
def test_low_order_checks_pass(name):
    assert cf.CHECKS[name](6).passed
