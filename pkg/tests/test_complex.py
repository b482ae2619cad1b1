import numpy as np
import pytest

from neumannkit.critical import find_critical_points
from neumannkit.eigenfield import closed_form
from neumannkit.errors import ComplexBuildError
from neumannkit.geometry import DomainSpec
from neumannkit import neumann_complex as nc


def _built(fld):
    cx = nc.build(fld)
    nc.classify_faces(cx)
    return cx


@pytest.fixture(scope="module")
def complexes(square1, disk1, disk2, annulus1):
    sq4 = closed_form(DomainSpec.square(), 4)
    return {"square_u1": _built(square1), "disk_u1": _built(disk1), "disk_u2": _built(disk2),
            "annulus_u1": _built(annulus1), "square_u4": _built(sq4)}


EXPECTED = {  # total, interior, boundary
    "square_u1": (4, 0, 4),
    "disk_u1": (1, 0, 1),
    "disk_u2": (3, 1, 2),
    "annulus_u1": (2, 0, 2),
    # 16 diagonal triangles; the 4 pairs meeting across nodal half-lines merge
    # into interior faces running from a maximum to a minimum
    "square_u4": (12, 4, 8),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_counts(complexes, name):
    cnt = nc.count_neumann_domains(complexes[name])
    assert (cnt.total, cnt.interior, cnt.boundary) == EXPECTED[name]


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_audits(complexes, name):
    cx = complexes[name]
    assert nc.euler_audit(cx).passed
    faces, area = nc.area_audit(cx)
    assert abs(faces - area) / area < 0.01
    assert nc.crossing_audit(cx)["passed"]
    assert nc.launch_robustness(cx)["passed"]
    assert all(r["passed"] for r in nc.left_end_check(cx, 10))


def test_disk_u1_puncture(complexes):
    cx = complexes["disk_u1"]
    assert len(cx.punctures) == 1 and np.linalg.norm(cx.punctures[0].location) < 1e-10
    assert not [e for e in cx.edges if e.kind != "boundary"]


def test_disk_u2_signs(complexes):
    cx = complexes["disk_u2"]
    by_class = {f.classification.value: [] for f in cx.faces}
    for f in cx.faces:
        by_class[f.classification.value].append(f.sign.value)
    # the interior face straddles the nodal line through the origin
    assert by_class["interior"] == ["mixed"]
    assert sorted(by_class["boundary"]) == ["negative", "positive"]


def test_square_u1_faces_are_quadrants(complexes):
    cx = complexes["square_u1"]
    assert sorted(round(f.area, 6) for f in cx.faces) == [0.25] * 4


def test_euler_audit_detects_tampering(complexes):
    cx = complexes["disk_u2"]
    saved = list(cx.edges)
    try:
        cx.edges.append(cx.edges[0])
        assert not nc.euler_audit(cx).passed
    finally:
        cx.edges[:] = saved


def test_degenerate_points_abort(disk2):
    crit = find_critical_points(disk2)
    p = crit.points[0]
    fake = type(p)(p.location, p.value, type(p.kind)("degenerate"), p.on_boundary, p.eigvals, p.eigvecs,
                   p.winding_index, p.multiplicity, p.is_singular)
    bad = type(crit)((fake,) + crit.points[1:], crit.circles, crit.grad_scale)
    with pytest.raises(ComplexBuildError):
        nc.build(disk2, bad)


def test_json_has_faces(complexes):
    doc = complexes["disk_u2"].to_json()
    assert len(doc["faces"]) == 3 and doc["edges"]
