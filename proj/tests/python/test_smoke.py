from fractions import Fraction

import pytest

import jetcount as jc


def square_map():
    return jc.Morphism(jc.affine_space("A1", ["x"]), jc.affine_space("A1y", ["y"]), ["x^2"])


def test_jet_regression():
    x = jc.Scheme("X", ["x1", "x2"], ["x1*x2^2"], dim=1)
    jet = jc.jet_prolong(x, 1)
    assert jet.equations == ["x1*x2^2", "x1(1)*x2^2 + 2*x1*x2*x2(1)"]
    assert jet.variables == ["x1", "x2", "x1(1)", "x2(1)"]


def test_poly_round_trip_and_eval():
    f = jc.parse_poly("x^2 + y^2 + z^2", ["x", "y", "z"])
    assert str(f) == "x^2 + y^2 + z^2"
    assert f.eval_mod([1, 2, 2], 3) == 0
    g = f.partial_derivative("x")
    assert str(g) == "2*x"
    assert f.jet_coefficient(1, 1) == jc.parse_poly(
        "2*x*x(1) + 2*y*y(1) + 2*z*z(1)", jc.jet_variables(["x", "y", "z"], 1)
    )


def test_counts_and_measures():
    vx2 = jc.Scheme("Vx2", ["x"], ["x^2"], dim=0, ci=True)
    assert jc.count_points(vx2, 3, 2)["count"] == 3
    assert jc.count_points(vx2, 3, 4, method="tree")["count"] == 9
    assert jc.count_points(vx2, 3, 2, ring="tseries")["count"] == 3

    phi = square_map()
    assert jc.count_fiber(phi, [0], 3, 4)["count"] == 9
    assert jc.g_value(phi, [0], 3, 4) == Fraction(9)
    assert jc.h_value(phi, [0], 3, 2) == Fraction(3)


def test_singular_locus():
    phi = square_map()
    assert jc.is_singular_point(phi, [0], 5)
    assert not jc.is_singular_point(phi, [3], 5)
    assert jc.singular_reduction_set(phi, 3) == [[0]]


def test_scan_and_verdicts():
    phi = square_map()
    table = jc.scan_gh(phi, primes=[3, 5], k_max=4)
    assert not table.truncated
    assert table.to_csv().splitlines()[0] == (
        "p,k,y,raw_count,singular_count,g_num,g_den,h_num,h_den"
    )
    frs = jc.frs_diagnostic(table)
    assert frs["outcome"] == "refuted"
    jf = jc.jetflat_diagnostic(table, 1)
    assert jf["fitted"]["epsilon"] == {"num": "1", "den": "2"}

    rows = [r for r in table.rows if r["y"] == [0] and r["p"] == 3]
    gs = {r["k"]: r["g"] for r in rows}
    assert gs == {1: Fraction(1), 2: Fraction(3), 3: Fraction(3), 4: Fraction(9)}


def test_presburger():
    f = jc.parse_constructible("s*q^(-s)")
    r = jc.sup_over_domain(f, 2)
    assert r["bounded"] and r["sup"] == Fraction(1, 2) and r["argmax"] == 1

    c = jc.classify_nonneg(jc.parse_constructible("1 - q^(s)"))
    assert c["answer"] == "counterexample" and c["value"] == Fraction(-1)

    v = jc.eval_constructible(jc.parse_constructible("s^2*q^(-s)*geom(-2)"), 2, 2)
    assert v == Fraction(4, 3)


def test_definition_file_and_errors():
    defs = jc.parse_definition_file(
        "[A1]\nvars = x\ndim = 1\nci = yes\n\n"
        "[A1y]\nvars = y\ndim = 1\n\n"
        "[sq]\nsource = A1\ntarget = A1y\nmaps = x^2\n"
    )
    assert set(defs["schemes"]) == {"A1", "A1y"}
    assert defs["morphisms"]["sq"].maps == ["x^2"]

    with pytest.raises(ValueError):
        jc.parse_poly("x + w", ["x"])
    with pytest.raises(RuntimeError):
        vx2 = jc.Scheme("Vx2", ["x"], ["x^2"], dim=0)
        jc.count_points(vx2, 3, 20, budget=100)


def test_eval_motivic():
    vsq = jc.Scheme("V", ["u", "c"], ["u^2 - c"], dim=0)
    one = jc.parse_constructible("1")
    assert jc.eval_motivic([jc.MotivicSummand(vsq, 1, one)], 5, [1], 0) == Fraction(2)
    line = jc.affine_space("A1", ["u"])
    qinv = jc.parse_constructible("q^(-s)")
    assert jc.eval_motivic([jc.MotivicSummand(line, 0, qinv)], 3, [], 1) == Fraction(1)


def test_langweil_and_estimates():
    xy = jc.Scheme("Vxy", ["x", "y"], ["x*y"], dim=1)
    est = jc.estimate_components(xy, [97, 101, 103])
    assert est["C"] == 2 and est["stable"]

    rep = jc.langweil_check(xy, 2, [7, 11, 13])
    assert rep["rows"][0]["deviation"] == Fraction(1, 7)

    plane = jc.affine_space("A2", ["x", "y"])
    dim = jc.estimate_dimension(plane, [11, 13])
    assert abs(dim["slope"] - 2.0) < 1e-9
