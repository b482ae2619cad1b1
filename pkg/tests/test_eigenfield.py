import json
import math

import numpy as np
import pytest

from neumannkit.eigenfield import EigenField, closed_form, domain_grid, evaluate
from neumannkit.errors import NoEigenvalueFound, OutOfRangeError, UnsupportedError
from neumannkit.geometry import DomainSpec
from neumannkit.mfs import ground_state, mfs_solve
from neumannkit.specfun import annulus_radial_root, bessel_root

CASES = [(DomainSpec.square(), k) for k in (1, 2, 4)] + [(DomainSpec.disk(), k) for k in (1, 2, 3, 4)] + [
    (DomainSpec.annulus(0.5), k) for k in (1, 2)]


def _ids(case):
    spec, k = case
    return f"{spec.label}-u{k}"


def test_square_spectrum():
    lams = [closed_form(DomainSpec.square(), k).lam / math.pi ** 2 for k in range(1, 7)]
    assert lams == pytest.approx([2, 5, 5, 8, 10, 10], abs=1e-12)


def test_disk_spectrum():
    lams = [closed_form(DomainSpec.disk(), k).lam for k in range(1, 7)]
    roots = [bessel_root(0, 1), bessel_root(1, 1), bessel_root(1, 1), bessel_root(2, 1), bessel_root(2, 1),
             bessel_root(0, 2)]
    assert lams == pytest.approx([z * z for z in roots], rel=1e-14)


def test_annulus_ground_state_is_radial():
    fld = closed_form(DomainSpec.annulus(0.5), 1)
    assert fld.lam == pytest.approx(annulus_radial_root(0.5, 1) ** 2, rel=1e-14)
    assert fld.meta["radial"]


@pytest.mark.parametrize("case", CASES, ids=_ids)
def test_helmholtz_residual(case):
    spec, k = case
    fld = closed_form(spec, k)
    pts = domain_grid(spec, 0.07)
    u, _, hess = fld.evaluate(pts)
    lap = hess[:, 0, 0] + hess[:, 1, 1]
    assert np.max(np.abs(lap + fld.lam * u)) < 1e-9 * fld.lam


@pytest.mark.parametrize("case", CASES, ids=_ids)
def test_boundary_residual_and_normalization(case):
    spec, k = case
    fld = closed_form(spec, k)
    t = np.linspace(0, 2 * math.pi, 400, endpoint=False)
    for c in spec.curves:
        assert np.max(np.abs(fld.value(c.position(t)))) < 1e-12
    u = fld.value(domain_grid(spec, 0.01))
    assert np.max(np.abs(u)) <= 1 + 1e-12
    assert abs(fld.value(np.array([fld.x_max]))[0]) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("case", CASES, ids=_ids)
def test_gradient_and_hessian_match_differences(case):
    spec, k = case
    fld = closed_form(spec, k)
    rng = np.random.default_rng(7)
    pts = domain_grid(spec, 0.1)
    pts = pts[rng.choice(len(pts), size=min(20, len(pts)), replace=False)]
    h = 1e-5
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    _, g, hess = fld.evaluate(pts)
    gx = (fld.value(pts + ex) - fld.value(pts - ex)) / (2 * h)
    gy = (fld.value(pts + ey) - fld.value(pts - ey)) / (2 * h)
    assert np.allclose(g[:, 0], gx, atol=1e-7 * fld.k)
    assert np.allclose(g[:, 1], gy, atol=1e-7 * fld.k)
    hxx = (fld.gradient(pts + ex)[:, 0] - fld.gradient(pts - ex)[:, 0]) / (2 * h)
    hxy = (fld.gradient(pts + ey)[:, 0] - fld.gradient(pts - ey)[:, 0]) / (2 * h)
    assert np.allclose(hess[:, 0, 0], hxx, atol=1e-6 * fld.lam)
    assert np.allclose(hess[:, 0, 1], hxy, atol=1e-6 * fld.lam)
    assert np.allclose(hess[:, 0, 1], hess[:, 1, 0])


def test_ground_states_positive():
    for spec in (DomainSpec.square(), DomainSpec.disk(), DomainSpec.annulus(0.5)):
        fld = closed_form(spec, 1)
        assert fld.value(domain_grid(spec, 0.02)).min() > -1e-14


def test_json_round_trip(tmp_path):
    for spec, k in CASES:
        fld = closed_form(spec, k)
        path = tmp_path / "f.json"
        fld.save(path)
        back = EigenField.load(path)
        pts = domain_grid(spec, 0.05)
        assert back.lam == fld.lam
        assert np.max(np.abs(back.value(pts) - fld.value(pts))) < 1e-12
    doc = json.loads(path.read_text())
    doc["schema"] = "other/1"
    with pytest.raises(ValueError):
        EigenField.from_json(doc)


def test_evaluate_range():
    fld = closed_form(DomainSpec.disk(), 1)
    u, g, h = evaluate(fld, (0.0, 0.0))
    assert u == pytest.approx(1.0)
    assert np.allclose(g, 0.0, atol=1e-14)
    evaluate(fld, (1.05, 0.0))  # inside the extension margin
    with pytest.raises(OutOfRangeError):
        evaluate(fld, (1.5, 0.0))


def test_closed_form_refuses_other_domains():
    with pytest.raises(UnsupportedError):
        closed_form(DomainSpec.flower(3, 0.3), 1)
    with pytest.raises(UnsupportedError):
        closed_form(DomainSpec.disk(), 0)


def test_mfs_disk_ground_state():
    fld = ground_state(DomainSpec.disk(), charges=60, symmetry=None)
    exact = closed_form(DomainSpec.disk(), 1)
    assert fld.lam == pytest.approx(exact.lam, abs=1e-8)
    pts = domain_grid(DomainSpec.disk(), 0.05)
    assert np.max(np.abs(fld.value(pts) - exact.value(pts))) < 1e-6


def test_mfs_window_without_eigenvalue():
    with pytest.raises(NoEigenvalueFound):
        mfs_solve(DomainSpec.disk(), (6.0, 7.0), charges=60)


def test_mfs_oval_matches_perturbation_of_disk():
    # R = 1 + 0.15 cos 2 phi has the same area to first order as the unit disk
    spec = DomainSpec.star([(0, 1, 0), (2, 0.15, 0)])
    fld = ground_state(spec, charges=80, symmetry=spec.dihedral_order)
    assert fld.lam == pytest.approx(5.96596127799, abs=1e-8)
    assert fld.value(domain_grid(spec, 0.03)).min() > -1e-8
    t = np.linspace(0, 2 * math.pi, 500, endpoint=False)
    assert np.max(np.abs(fld.value(spec.curves[0].position(t)))) < 1e-6


def test_mfs_flower_ground_state_positive():
    spec = DomainSpec.flower(3, 0.45)
    fld = ground_state(spec, charges=80, symmetry=3, d_scale=0.1)
    assert fld.value(domain_grid(spec, 0.02)).min() > -1e-6
    assert fld.meta["sigma"] < 1e-6
