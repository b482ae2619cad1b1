import math

import numpy as np
import pytest

from neumannkit import analysis as an
from neumannkit.critical import find_critical_points
from neumannkit.eigenfield import closed_form
from neumannkit.errors import PreconditionError
from neumannkit.geometry import DomainSpec
from neumannkit.neumann_complex import NeumannCount
from neumannkit.specfun import bessel_derivative_root, bessel_root


@pytest.mark.parametrize("kind, k, count", [
    ("square", 1, 1), ("square", 2, 2), ("square", 4, 4), ("square", 5, 3),
    ("disk", 1, 1), ("disk", 2, 2), ("disk", 4, 4), ("disk", 6, 2),
])
def test_nodal_counts(kind, k, count):
    spec = DomainSpec.square() if kind == "square" else DomainSpec.disk()
    part = an.nodal_partition(closed_form(spec, k), h=0.01)
    assert part.count == count
    assert part.count_refined == count


def test_nodal_annulus(annulus1):
    assert an.nodal_partition(annulus1).count == 1


def test_nodal_precondition(disk1):
    with pytest.raises(PreconditionError):
        an.nodal_partition(disk1, h=0.05)


def test_nodal_signs(disk2):
    part = an.nodal_partition(disk2)
    assert len(part.positive) == 1 and len(part.negative) == 1


def test_payne_points(disk2, disk1):
    pts = sorted((p.tolist() for p in an.payne_points(disk2)), key=lambda p: p[1])
    assert np.allclose(pts, [[0, -1], [0, 1]], atol=1e-9)
    assert an.payne_points(disk1) == []


def test_courant(disk1, disk2):
    rows = an.courant_check([closed_form(DomainSpec.square(), k) for k in range(1, 7)])
    assert all(r["passed"] for r in rows)
    assert [r["k"] for r in rows] == list(range(1, 7))


def test_corollary_checks(disk2):
    crit = find_critical_points(disk2)
    part = an.nodal_partition(disk2)
    res = an.corollary_checks(NeumannCount(3, 1, 2, 0), part, crit)
    assert res["passed"] and res["maxima"] == 1 and res["nodal"] == 2
    bad = an.corollary_checks(NeumannCount(0, 0, 0, 0), part, crit)
    assert not bad["maxima_bound"] and not bad["nodal_bound"]


def test_identities(disk1, disk2, square1):
    assert an.identity_checks(find_critical_points(disk1), disk1)["saddle_identity"]
    res = an.identity_checks(find_critical_points(disk2), disk2)
    assert res["multiplicity_sum"] == -1 and res["multiplicity_identity"]
    # corner saddles vanish with u, so they are not counted as n_S
    sq = an.identity_checks(find_critical_points(square1), square1)
    assert (sq["n_S"], sq["n_E"]) == (0, 1) and sq["saddle_identity"]


def test_a_constant_monotone():
    lam = 20.0
    vals = [an.a_constant(t, lam) for t in np.linspace(0.1, 10, 20)]
    assert vals[0] > 0.1
    assert an.a_constant(0.0, lam) == pytest.approx(math.sqrt(2 * lam / math.pi))


@pytest.mark.parametrize("spec", [DomainSpec.disk(), DomainSpec.annulus(0.5)], ids=["disk", "annulus"])
def test_gradient_bound(spec):
    rep = an.gradient_bound_check(closed_form(spec, 1), h=0.005)
    assert rep.precondition_ok and rep.passed and rep.margin > 0
    assert rep.lhs <= math.sqrt(math.e) * (rep.A + rep.lam / (4 * rep.A))


def test_gradient_sup_disk_exact(disk1):
    # |grad u| = j01 J1(j01 r), largest where J1 peaks, inside the disk
    sup, at = an.gradient_sup(disk1, h=0.01)
    j01 = bessel_root(0, 1)
    peak = bessel_derivative_root(1, 1)
    from scipy.special import j1
    assert sup == pytest.approx(j01 * j1(peak), rel=1e-9)
    assert np.hypot(*at) == pytest.approx(peak / j01, abs=1e-5)


def test_inscribed_radius():
    # n = 3..6 values quoted in the decisions ledger
    assert [round(an.inscribed_radius(n), 4) for n in (3, 4, 5, 6)] == [0.4613, 0.3696, 0.3029, 0.2554]
    assert an.inscribed_radius(1) == 0.5


def test_published_certificate_values():
    cert = an.paper_certificate(3, 0.26)
    assert cert.Lambda == pytest.approx(bessel_root(0, 1) ** 2 / cert.C ** 2)
    assert cert.theta >= 16.0
    assert cert.value == pytest.approx((0.5 - 0.26) * cert.F)
    assert not cert.holds
    # endpoint maximum of a convex function: interior samples never exceed it
    f = lambda x: math.sqrt(math.e) * (x + cert.Lambda / (4 * x))
    xs = np.linspace(0.5 * math.sqrt(cert.Lambda), cert.theta + math.sqrt(cert.Lambda), 101)
    assert max(f(x) for x in xs) <= cert.F * (1 + 1e-12)


def test_ray_points_on_rays():
    spec = DomainSpec.flower(4, 0.3)
    pts = an.ray_segment_points(spec, 50)
    from neumannkit.geometry import distance_to_rays
    assert np.allclose(distance_to_rays(pts, 4), 0, atol=1e-12)
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.min() > 0.3 and r.max() < 0.5


def test_flower_search_and_symmetry(ws):
    res = ws.flower(3)
    assert 0.25 < res.a < 0.5 and res.direct["holds"] and res.lambda_bound_ok
    crit = ws.crit(res.field.domain)
    sym = an.symmetry_and_maxima_check(res.field, crit)
    assert sym["passed"] and sym["maxima"] == 3


def test_symmetry_check_needs_flower(disk1):
    with pytest.raises(PreconditionError):
        an.symmetry_and_maxima_check(disk1, find_critical_points(disk1))


def test_search_margin_precondition():
    with pytest.raises(PreconditionError):
        an.flower_a_search(3, margin=0.7)
