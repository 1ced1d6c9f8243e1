import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh

from hardyspec.discretize import (AssemblyError, Mesh, MeshError, Pencil, assemble_groundstate_frame,
                                  assemble_pencil, make_mesh)
from hardyspec.scenarios import (Interval, RadialAnnulus, RadialBall, RadialExterior, WeightSpec,
                                 pair_delta)

DELTA2 = WeightSpec("PowerDelta", alpha=2.0)


def test_uniform_mesh_and_p1_closed_form():
    # consistent-mass P1 eigenvalues of -u'' on a uniform mesh
    N = 41
    mesh = make_mesh(Interval(1.0), N, 1.0, singular_ends=())
    pen = assemble_pencil(Interval(1.0), mesh=mesh)
    h = 1.0 / (N - 1)
    k = np.arange(1, 6)
    ref = 6.0 / h ** 2 * (1 - np.cos(k * math.pi * h)) / (2 + np.cos(k * math.pi * h))
    K, M = pen.dense()
    assert eigh(K, M, eigvals_only=True)[:5] == pytest.approx(ref, rel=1e-11)


def test_graded_mesh_structure():
    dom = Interval(1.0)
    m = make_mesh(dom, 401, 0.8, 1e-8)
    assert m.nodes[0] == 1e-8 and m.nodes[-1] == 1.0 - 1e-8
    assert m.h[0] == pytest.approx(1e-8, rel=1e-6)
    assert m.grading_ok()
    assert m.nodes[200] == 0.5
    assert set(m.graded) == {"lo", "hi"}


def test_ball_origin_is_free():
    m = make_mesh(RadialBall(3, 1.0), 301, 0.9, 1e-6)
    assert m.dirichlet == (False, True)
    assert m.nodes[0] == 0.0 and 0 in m.free()


def test_infeasible_mesh():
    with pytest.raises(MeshError):
        make_mesh(Interval(1.0), 41, 0.6, 1e-6)
    with pytest.raises(MeshError):
        make_mesh(Interval(1.0), 2)
    with pytest.raises(MeshError):
        Mesh(np.array([0.0, 0.5, 0.4]))


def test_bisect_keeps_grading():
    m = make_mesh(Interval(1.0), 201, 0.8, 1e-6)
    b = m.bisect()
    assert b.N == 401 and b.q == m.q and b.grading_ok()
    assert np.array_equal(b.nodes[::2], m.nodes)


def test_exterior_mesh_is_log_uniform():
    m = make_mesh(RadialExterior(3, 1.0, 1e4), 101)
    r = m.nodes[1:] / m.nodes[:-1]
    assert np.allclose(r, r[0], rtol=1e-12)


def test_ball_converges_to_pi_squared():
    dom = RadialBall(3, 1.0)
    vals = []
    for N in (101, 201, 401):
        K, M = assemble_pencil(dom, mesh=make_mesh(dom, N, 1.0, singular_ends=())).dense()
        vals.append(eigh(K, M, eigvals_only=True)[0])
    errs = np.abs(np.array(vals) - math.pi ** 2)
    assert errs[-1] < 1e-3 and errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)
    assert all(v >= math.pi ** 2 for v in vals)  # conforming: upper bounds


def test_text_round_trip():
    dom = Interval(1.0)
    pen = assemble_pencil(dom, weight=DELTA2, mesh=make_mesh(dom, 121, 0.8, 1e-4), scenario="x")
    back = Pencil.from_text(pen.to_text())
    for a, b in ((pen.Kd, back.Kd), (pen.Ko, back.Ko), (pen.Md, back.Md), (pen.Mo, back.Mo)):
        assert np.array_equal(a, b)
    assert np.array_equal(pen.mesh.nodes, back.mesh.nodes)
    assert back.meta["scenario"] == "x"


def test_requires_mesh_and_dirichlet():
    with pytest.raises(AssemblyError):
        assemble_pencil(Interval(1.0))
    dom = Interval(1.0)
    with pytest.raises(AssemblyError):
        assemble_pencil(dom, mesh=make_mesh(dom, 11, 1.0, singular_ends=()), bc="neumann")


_PEN = assemble_pencil(Interval(1.0), weight=DELTA2, mesh=make_mesh(Interval(1.0), 201, 0.8, 1e-6))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=199, max_size=199))
def test_rayleigh_quotients_respect_hardy(v):
    # conforming P1: every discrete quotient is a continuum quotient, hence >= 1/4
    x = np.array(v)
    if np.linalg.norm(x) < 1e-3:
        return
    assert _PEN.rayleigh(x) >= 0.25 - 1e-12


def test_groundstate_frame_shifts_spectrum_by_one():
    dom = Interval(1.0)
    mesh = make_mesh(dom, 201, 0.8, 1e-6)
    W = WeightSpec("InverseSquareDelta")
    direct = assemble_pencil(dom, weight=W, mesh=mesh)
    frame = assemble_groundstate_frame(pair_delta(dom), weight=W, mesh=mesh, domain=dom)
    a = eigh(*direct.dense(), eigvals_only=True)[:4]
    b = eigh(*frame.dense(), eigvals_only=True)[:4]
    assert b + 1.0 == pytest.approx(a, rel=1e-9)


def test_annulus_potential_shift_records_negative_modes():
    dom = RadialAnnulus(3, 1.0, 2.0)
    from hardyspec.scenarios import OperatorSpec
    op = OperatorSpec(shift=WeightSpec("IteratedLogW", i=0, D=1.0))
    pen = assemble_pencil(dom, op, WeightSpec("IteratedLogJ", i=1, D=1.0), make_mesh(dom, 201, 0.8, 1e-6))
    assert "negative_modes" in pen.meta
