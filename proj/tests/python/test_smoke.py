import json
import math

import numpy as np
import pytest

import spherebranch as sb


def test_spectrum_k3():
    spec = sb.pencil_eigenvalues(sb.example_pencil(3, 16), sb.Window(-1.0, 10.5))
    assert spec[0].geometric_mult == 3
    assert [round(e.lambda_) for e in spec[1:4]] == [4, 5, 6]


def test_certify_and_degree():
    for k in (1, 2, 3):
        p = sb.example_pencil(k, 12)
        cert = sb.certify(p, 0.0)
        assert cert.h3_holds
        assert cert.h2_odd == (k != 2)
        c = sb.eigenset_contribution(p, 0.0, sb.Window(-0.5, 0.5 * (k + 1)))
        assert (c.value == 0) == (k == 2)
        assert sb.ls_sign(p, 1.0, -0.25) != sb.ls_sign(p, 1.0, 0.25) or k == 2


def test_branch_and_verdict():
    prob = sb.example_problem(3, 12)
    e3 = np.zeros(12)
    e3[2] = 1.0
    anchor = sb.SolutionPoint(0.0, 0.0, e3)
    br = sb.trace_branch(prob, anchor, 1)
    assert br.termination == sb.Termination.TrivialReturn
    assert math.isclose(br.lambda_second, 4.0, abs_tol=1e-6)
    v = sb.classify_component(prob, anchor, 10.0)
    assert v.verdict == sb.Verdict.TrivialReturn
    pts = sb.detect_bifurcation_points(prob, 0.0)
    assert len(pts) == 2


def test_map_and_fit():
    comps = sb.trace_components(sb.example_problem(2, 16), sb.PlaneWindow(-0.3, 0.3, -0.5, 0.5))
    assert len(comps) == 1 and comps[0].kind == sb.ComponentKind.IsolatedPoint
    comps = sb.trace_components(sb.example_problem(3, 16), sb.PlaneWindow(-1, 1, -1, 8), grid=120)
    curve = [c for c in comps if c.kind == sb.ComponentKind.ClosedCurve][0]
    fit = sb.fit_conic(curve)
    assert math.isclose(fit.lambda0, 2.0, abs_tol=1e-6)
    assert math.isclose(fit.a_s, 1 / math.sqrt(3), abs_tol=1e-6)


def test_json_problem_and_errors():
    prob = sb.problem_from_json(json.dumps(
        {"dim": 6, "L": {"builder": "Tk", "k": 2}, "C": {"builder": "harmonic"}, "N": {"builder": "paper_N"}}))
    assert prob.dim == 6
    with pytest.raises(sb.SpherebranchError, match="unknown key"):
        sb.problem_from_json(json.dumps({"dim": 6, "L": {"builder": "Tk", "k": 2},
                                         "C": {"builder": "harmonic"}, "X": 1}))
    with pytest.raises(sb.SpherebranchError):
        sb.ls_sign(sb.example_pencil(1, 6), 1.0, 0.0)


def test_run_example_report():
    rep = json.loads(sb.run_example("k1", 10))
    assert rep["results"]["degree"]["contribution_at_0"]["value"] in (-2, 2)
    assert rep["version"] == sb.__version__
