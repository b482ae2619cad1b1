import numpy as np
import pytest

from neumannkit.critical import Kind, find_critical_points
from neumannkit.flow import Direction, EndKind, Tracer, left_end, separatrices, trace


@pytest.fixture(scope="module")
def disk2_flow(disk2):
    return disk2, find_critical_points(disk2)


def test_forward_descends_to_minimum(disk2_flow):
    # forward follows -grad u
    fld, crit = disk2_flow
    tr = trace(fld, crit, (-0.3, 0.2), Direction.FORWARD)
    assert tr.end.kind is EndKind.CRITICAL and tr.end.point.kind is Kind.MIN
    assert tr.is_monotone()
    assert tr.max_spacing() <= 0.01 + 1e-12


def test_forward_from_positive_lobe_reaches_boundary(disk2_flow):
    fld, crit = disk2_flow
    tr = trace(fld, crit, (0.6, 0.6), Direction.FORWARD)
    assert tr.end.kind is EndKind.BOUNDARY
    assert abs(np.linalg.norm(tr.end.location) - 1) < 1e-8
    assert tr.is_monotone()


def test_left_end_is_the_maximum(disk2_flow):
    fld, crit = disk2_flow
    # the left end follows the direction of increasing u
    end = left_end(fld, crit, (0.2, -0.3))
    assert end.kind is EndKind.CRITICAL and end.point.kind is Kind.MAX


def test_flow_is_symmetric(disk2_flow):
    fld, crit = disk2_flow
    a = trace(fld, crit, (0.3, 0.2), Direction.FORWARD).points
    b = trace(fld, crit, (0.3, -0.2), Direction.FORWARD).points
    n = min(len(a), len(b))
    assert np.allclose(a[:n, 0], b[:n, 0], atol=1e-9)
    assert np.allclose(a[:n, 1], -b[:n, 1], atol=1e-9)


def test_square_corner_separatrices(square1):
    crit = find_critical_points(square1)
    corner = next(p for p in crit.of_kind(Kind.SADDLE) if np.allclose(p.location, (0, 0)))
    seps = separatrices(square1, crit, corner)
    ends = {t.end.kind for t in seps}
    # interior separatrix climbs the diagonal to the maximum
    assert EndKind.CRITICAL in ends
    climb = next(t for t in seps if t.end.kind is EndKind.CRITICAL)
    assert climb.end.point.kind is Kind.MAX
    assert np.allclose(climb.points[:, 0], climb.points[:, 1], atol=1e-6)


def test_annulus_flow_ends_on_circle(annulus1):
    crit = find_critical_points(annulus1)
    end = Tracer(annulus1, crit).left_end((0.0, 0.6))
    assert end.kind is EndKind.CIRCLE
    assert end.angle == pytest.approx(np.pi / 2, abs=1e-6)
