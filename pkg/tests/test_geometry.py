import math

import numpy as np
import pytest

from neumannkit.errors import ParameterError, UnsupportedError
from neumannkit.geometry import (DomainSpec, boundary, contains, distance_to_rays, min_mean_curvature_bound,
                                 symmetry_rays)


@pytest.mark.parametrize("spec, area", [
    (DomainSpec.square(), 1.0),
    (DomainSpec.disk(), math.pi),
    (DomainSpec.annulus(0.5), math.pi * 0.75),
])
def test_area(spec, area):
    assert spec.area() == pytest.approx(area, rel=1e-6)


def test_flower_area_is_outer_minus_hole():
    n, a = 4, 0.3
    # area inside r = 1 + cos(n phi)/2 is pi (1 + 1/8)
    assert DomainSpec.flower(n, a).area() == pytest.approx(math.pi * (1.125 - a * a), rel=1e-6)


@pytest.mark.parametrize("kwargs", [
    dict(kind="annulus", a=1.2), dict(kind="annulus", a=0.0), dict(kind="flower", n=3, a=0.2),
    dict(kind="flower", n=3, a=0.5), dict(kind="flower", n=0, a=0.3), dict(kind="blob"),
    dict(kind="star"),
])
def test_rejects_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        DomainSpec(**kwargs)


def test_contains_signs():
    disk = DomainSpec.disk()
    inside, c = contains(disk, (0.5, 0.0))
    assert inside and c == pytest.approx(0.5, abs=1e-6)
    outside, c = contains(disk, (1.5, 0.0))
    assert not outside and c == pytest.approx(-0.5, abs=1e-6)
    ann = DomainSpec.annulus(0.5)
    assert not contains(ann, (0.1, 0.1))[0]
    assert contains(ann, (0.0, 0.75))[0]


def test_boundary_orientation_keeps_domain_on_left():
    # normals point outward, so stepping against them enters the domain
    for spec in (DomainSpec.disk(), DomainSpec.annulus(0.4), DomainSpec.flower(3, 0.3)):
        for curve in boundary(spec):
            t = np.linspace(0, 2 * math.pi, 50, endpoint=False)
            inward = curve.position(t) - 1e-3 * curve.normal(t)
            outward = curve.position(t) + 1e-3 * curve.normal(t)
            assert np.all(spec.inside(inward))
            assert not np.any(spec.inside(outward))


def test_config_round_trip():
    for spec in (DomainSpec.square(), DomainSpec.annulus(0.5), DomainSpec.flower(5, 0.3),
                 DomainSpec.star([(0, 1, 0), (2, 0.15, 0)])):
        assert DomainSpec.from_config(spec.to_config()) == spec


def test_curvature_bound():
    assert min_mean_curvature_bound(DomainSpec.disk(), samples=1000) == 0.0
    # the inner circle of the annulus has curvature -1/a
    assert min_mean_curvature_bound(DomainSpec.annulus(0.5), samples=1000, margin=0.0) == pytest.approx(2.0)
    with pytest.raises(UnsupportedError):
        min_mean_curvature_bound(DomainSpec.square())


def test_symmetry_rays_pass_through_pinches():
    n = 5
    rays = symmetry_rays(n)
    assert len(rays) == n
    outer = DomainSpec.flower(n, 0.3).curves[0]
    for ang in rays:
        # outer radius 1 + cos(n phi)/2 is minimal (1/2) on every ray
        assert outer.radius(ang) == pytest.approx(0.5, abs=1e-12)
    pts = np.array([[math.cos(r), math.sin(r)] for r in rays]) * 0.7
    assert np.allclose(distance_to_rays(pts, n), 0.0, atol=1e-12)
