"""Smoke tests for the python bindings: one probe per operation family."""

import json
import math

import polytorus as pt


def test_monomial_roundtrip():
    m = pt.factorize(9000)
    assert list(m.alpha) == [3, 2, 3]
    assert m.weight == 16
    assert pt.index_of([3, 2, 3]) == 9000
    for n in range(1, 2000):
        assert pt.index_of(list(pt.factorize(n).alpha)) == n
    assert pt.weight_of(12) == 4
    assert pt.in_abschnitt(12, 2)
    assert not pt.in_abschnitt(10, 2)


def test_enumerate_and_primes():
    idx = pt.enumerate_indices("max_weight:2")
    assert [m.n for m in idx] == [1, 2, 3, 4]
    assert pt.nth_prime(5) == 11


def test_series_norms_and_dilation():
    f = pt.CoefficientSeries({2: 1 + 0j, 3: 1 + 0j}, "max_index:3", "demo")
    d = pt.dilate(f, 0.5)
    assert math.isclose(pt.norm2_exact_dilated(d), math.sqrt(0.25 + 0.0625), rel_tol=1e-12)
    assert pt.dilation_compose_error(f, 0.9, 0.8) < 1e-12
    g = pt.partial_sum(f, 2)
    assert g.term_count() == 1
    h = pt.multiplier_apply({2: 2 + 0j, 3: 0j}, None, f)
    assert h.coefficients == {2: 2 + 0j}


def test_mc_norm_reproducible_and_unbiased():
    f = pt.CoefficientSeries({2: 1 + 0j}, "max_index:2", "single")
    a = pt.mc_norm(f, 2.0, 0.7, 5000, 42)
    b = pt.mc_norm(f, 2.0, 0.7, 5000, 42)
    assert a.mean == b.mean and a.stderr == b.stderr
    assert abs(a.mean - 0.49) <= 3 * a.stderr
    prof = pt.norm_profile(f, 2.0, [0.5, 0.9], 4000, 1)
    assert pt.profile_monotone_ok(prof)


def test_randomization_isometry():
    f = pt.CoefficientSeries({2: 1 + 0j, 3: 1 + 0j}, "max_index:3", "demo")
    x = pt.Realization.draw(pt.RandomModel.bernoulli(), 3, pt.RngStream.from_seed(5, "bernoulli"))
    g = pt.randomize(f, x)
    assert pt.norm2_exact(g) == pt.norm2_exact(f)
    mom = pt.randomized_moment(f, pt.RandomModel.gaussian_iid(), 2.0, 0.9, 100, 200, 3)
    assert abs(mom["mean"] - (0.81 + 0.6561)) <= 4 * mom["stderr"]


def test_gaussian_tail_and_root_test():
    upper, small = pt.gaussian_tail_bound(1.0)
    assert math.isclose(upper, math.sqrt(2 / math.pi) * math.exp(-0.5), rel_tol=1e-12)
    assert small > 0
    rep = pt.root_test([0.5 ** pt.weight_of(n) for n in range(2, 300)], 2)
    assert rep["verdict"] == "converges"


def test_identity_report():
    rep = pt.geometric_weight_sum(0.5, 40)
    assert rep["consistent"]
    assert abs(rep["rhs"] - 3.4627466194550636) < 1e-11


def test_dirichlet_bridge():
    q = pt.DirichletPolynomial({1: 1 + 0j, 2: 1 + 0j})
    assert pt.evaluate_dirichlet(q, 0j) == 2 + 0j
    f = pt.bohr_lift(q)
    assert pt.bohr_inverse(f) == q
    est = pt.besicovitch_norm(q, 2.0, 1000.0, pt.besicovitch_default_step(q))
    assert abs(est["mean_p"] - 2.0) < 0.05
    rep = pt.isometry_check(q, 2.0, 1000.0, 4000, 9)
    assert rep["pass"]


def test_experiment_payload_reproducible():
    config = {"experiment": "khintchine", "seed": 33, "outer": 30, "inner": 100}
    a = pt.run_khintchine(config)
    b = pt.run_khintchine(config)
    assert a["payload"] == b["payload"]
    assert a["payload"]["pass"]
    # the wall-time field sits outside the reproducible payload
    assert "wall_time_ms" in a and "wall_time_ms" not in a["payload"]


def test_families():
    assert set(pt.family_names()) >= {"one_over_n", "one_over_sqrt_n"}
    assert pt.family_is_l2("one_over_n")
    assert not pt.family_is_l2("non_square_summable")
    f = pt.make_family("one_over_n", "max_index:100")
    assert f.term_count() == 100
