from __future__ import annotations

import numpy as np
import pytest

from lattes.errors import NotALineError, VerificationFailure
from lattes.maps import HomogeneousMap, map_f, map_g, power_map
from lattes.orbits import (
    EXPECTED_G_ARROWS,
    ProjLine,
    critical_lines,
    fit_line,
    image_of_line,
    lattes_obstruction_report,
    line_label,
    named_line,
    post_critical_graph,
    situation5_branch_lines,
    transverse_multiplicity,
)


def test_proj_line_normalization():
    a = ProjLine([0, -2, 2])
    assert a.coeffs[1].real > 0 and abs(np.linalg.norm(a.coeffs) - 1) < 1e-15
    assert a.same(ProjLine([0, 3j, -3j]))
    assert a.label == "{Y=Z}"
    assert line_label(ProjLine([1, -1, -1])) == "{X-Y-Z=0}"
    for p in a.points():
        assert abs(a.evaluate(p)) < 1e-14


def test_named_lines_roundtrip():
    for label in ("{X=0}", "{2Y=X}", "{X=Z}"):
        assert named_line(label).label == label


def test_fit_line_rejects_non_collinear_points():
    with pytest.raises(NotALineError):
        fit_line([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3]])
    with pytest.raises(NotALineError):
        fit_line([[1, 2, 3]] * 5)


def test_critical_lines_of_g():
    labels = {l.label for l in critical_lines(map_g())}
    assert labels == {"{X=0}", "{2Y=X}", "{2Z=X}"}


def test_critical_lines_need_squared_forms():
    F = HomogeneousMap(({(2, 0, 0): 1}, {(0, 2, 0): 1}, {(0, 0, 2): 1, (1, 1, 0): 1}), 2, "h")
    with pytest.raises(VerificationFailure):
        critical_lines(F)


def test_image_of_line():
    # g({X=0}) = {Z=0}
    img = image_of_line(map_g(), ProjLine([1, 0, 0]))
    assert img.label == "{Z=0}"


def test_g_graph_matches_diagram():
    G = post_critical_graph(map_g())
    assert G.closed
    assert set(G.arrows()) == set(EXPECTED_G_ARROWS)
    assert len(G.post_critical) == 6
    assert len(G.nodes) == 8
    js = G.to_json()
    assert len(js["edges"]) == 8
    assert all(abs(np.linalg.norm([complex(*c) for c in n["coeffs"]]) - 1) < 1e-12 for n in js["nodes"])
    assert "{X=0} -> {Z=0}" in G.to_text()


@pytest.mark.parametrize("i", [1, 2, 3])
def test_f_graphs_close(i):
    G = post_critical_graph(map_f(i))
    assert G.closed
    assert len(G.post_critical) == 6


def test_graph_depth_floor():
    with pytest.raises(ValueError):
        post_critical_graph(map_g(), max_depth=3)


def test_generic_map_is_not_line_critically_finite():
    rng = np.random.default_rng(3)
    F = HomogeneousMap.from_squared_linear_forms(rng.normal(size=(3, 3)), name="rand")
    G = post_critical_graph(F)
    assert not G.closed and G.error
    rep = lattes_obstruction_report(F)
    assert not rep.critically_finite


def test_power_map_has_invariant_critical_lines():
    G = post_critical_graph(power_map())
    assert G.closed and len(G.post_critical) == 3


def test_branch_lines():
    labels = {l.label for l in situation5_branch_lines()}
    assert labels == {"{X=0}", "{Y=0}", "{Z=0}", "{X=Y}", "{Y=Z}", "{X=Z}"}


def test_fold_order():
    assert transverse_multiplicity(map_g(), ProjLine([1, 0, 0])) == 2


def test_report_for_g():
    rep = lattes_obstruction_report(map_g())
    assert rep.post_critical_lines == 6
    assert rep.candidate_entries == [5]
    assert rep.inside_situation5_branch_locus
    assert rep.target_line_stabilizer_order == 2
    assert rep.multiplicity_mismatch is True


def test_report_for_f1():
    rep = lattes_obstruction_report(map_f(1))
    assert rep.inside_situation5_branch_locus
    assert rep.multiplicity_mismatch is None
