import math

import numpy as np
import pytest

from neumannkit.critical import (CircleKind, Kind, classify_hessian, detect_critical_circle, find_critical_points,
                                 morse_counts, multiplicity, winding_index)
from neumannkit.eigenfield import closed_form
from neumannkit.errors import PreconditionError
from neumannkit.geometry import DomainSpec
from neumannkit.specfun import bessel_derivative_root, bessel_root


def _locs(points):
    return sorted(tuple(np.round(p.location, 9)) for p in points)


def test_square_u1(square1):
    crit = find_critical_points(square1)
    maxima = crit.of_kind(Kind.MAX)
    assert len(maxima) == 1 and np.allclose(maxima[0].location, (0.5, 0.5), atol=1e-12)
    saddles = crit.of_kind(Kind.SADDLE)
    assert _locs(saddles) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(s.on_boundary and s.is_singular for s in saddles)


def test_square_u4_interior_saddle():
    fld = closed_form(DomainSpec.square(), 4)  # sin 2 pi x sin 2 pi y
    crit = find_critical_points(fld)
    assert len(crit.of_kind(Kind.MAX)) == 2 and len(crit.of_kind(Kind.MIN)) == 2
    inner = [s for s in crit.of_kind(Kind.SADDLE) if not s.on_boundary]
    assert len(inner) == 1 and np.allclose(inner[0].location, (0.5, 0.5), atol=1e-12)


def test_disk_u1_single_maximum(disk1):
    crit = find_critical_points(disk1)
    assert len(crit.points) == 1
    p = crit.points[0]
    assert p.kind is Kind.MAX and np.linalg.norm(p.location) < 1e-10
    assert p.winding_index == 1


def test_disk_u2(disk2):
    crit = find_critical_points(disk2)
    mx, mn = crit.of_kind(Kind.MAX), crit.of_kind(Kind.MIN)
    r = bessel_derivative_root(1, 1) / bessel_root(1, 1)
    assert len(mx) == 1 and np.allclose(mx[0].location, (r, 0), atol=1e-10)
    assert len(mn) == 1 and np.allclose(mn[0].location, (-r, 0), atol=1e-10)
    bdry = [p for p in crit.points if p.on_boundary]
    assert _locs(bdry) == [(0, -1), (0, 1)]
    assert all(p.kind is Kind.SADDLE and p.multiplicity == 1 for p in bdry)
    # the origin is a zero of u but a regular point of grad u
    assert not any(np.linalg.norm(p.location) < 1e-6 for p in crit.points)


def test_classify_hessian():
    assert classify_hessian(np.diag([-2.0, -1.0]))[0] is Kind.MAX
    assert classify_hessian(np.diag([1.0, 3.0]))[0] is Kind.MIN
    assert classify_hessian(np.diag([-1.0, 3.0]))[0] is Kind.SADDLE
    assert classify_hessian(np.diag([0.0, 3.0]))[0] is Kind.DEGENERATE


def test_winding_indices(square1):
    assert winding_index(square1, (0.5, 0.5)) == 1
    fld = closed_form(DomainSpec.square(), 4)
    assert winding_index(fld, (0.5, 0.5)) == -1
    assert winding_index(fld, (0.25, 0.25)) == 1
    assert winding_index(fld, (0.4, 0.1)) == 0


def test_multiplicity_of_corner_saddle(square1):
    # near a corner u ~ xy, a simple saddle
    assert multiplicity(square1, (0.0, 0.0)) == 1


def test_annulus_circle(annulus1):
    circ = detect_critical_circle(annulus1)
    assert circ is not None and circ.kind is CircleKind.MAX_CURVE
    pts = np.array([circ.point(t) for t in np.linspace(0, 2 * math.pi, 32)])
    assert np.max(np.linalg.norm(annulus1.gradient(pts), axis=1)) < 1e-10
    crit = find_critical_points(annulus1)
    assert not crit.points and len(crit.circles) == 1


def test_no_circle_for_non_radial(disk2):
    assert detect_critical_circle(disk2) is None


def test_seed_refinement_is_stable(disk2):
    a = find_critical_points(disk2, h=0.05)
    b = find_critical_points(disk2, h=0.025)
    assert _locs(a.points) == _locs(b.points)


def test_seed_spacing_precondition(disk1):
    with pytest.raises(PreconditionError):
        find_critical_points(disk1, h=0.1)


def test_morse_counts(disk1, disk2):
    assert morse_counts(find_critical_points(disk1))[:2] == (0, 1)
    n_s, n_e, m_int, m_bdry = morse_counts(find_critical_points(disk2))
    assert (n_s, n_e, m_int, m_bdry) == (0, 2, 0, 2)
