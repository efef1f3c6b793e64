#include <doctest.h>

#include <cmath>

#include "polytorus/kahan.hpp"
#include "polytorus/torus_norm.hpp"

using namespace polytorus;

namespace {

CoefficientSeries two_term() {
    return CoefficientSeries({{2, {1.0, 0.0}}, {3, {1.0, 0.0}}}, TruncationPolicy::max_index(3),
                             "two");
}

} // namespace

TEST_CASE("torus samples are unimodular and deterministic") {
    RngStream a = RngStream::from_seed(7, "torus");
    TorusPoint w = sample_torus(3, a);
    REQUIRE(w.dim() == 3);
    for (const auto& c : w.coords) CHECK(std::abs(std::abs(c) - 1.0) < 1e-12);

    RngStream b = RngStream::from_seed(7, "torus");
    TorusPoint w2 = sample_torus(3, b);
    for (std::size_t j = 0; j < 3; ++j) CHECK(w.coords[j] == w2.coords[j]);

    CHECK_THROWS_AS(sample_torus(0, a), std::domain_error);
}

TEST_CASE("empirical coordinate mean vanishes at CLT scale") {
    RngStream s = RngStream::from_seed(123, "torus");
    KahanComplexSum acc;
    const int N = 100000;
    for (int i = 0; i < N; ++i) acc.add(s.next_circle());
    CHECK(std::abs(acc.value()) / N < 0.02); // 3/sqrt(N) oracle, generous
}

TEST_CASE("evaluate on closed-form points") {
    CoefficientSeries c3({{1, {3.0, 0.0}}}, TruncationPolicy::max_index(1), "");
    TorusPoint w0; // constant term needs no coordinates
    CHECK(evaluate(dilate(c3, 0.9), w0) == Complex{3.0, 0.0});

    CoefficientSeries f({{2, {1.0, 0.0}}}, TruncationPolicy::max_index(2), "");
    TorusPoint wi{{Complex{0.0, 1.0}}};
    Complex v = evaluate(dilate(f, 0.5), wi);
    CHECK(v.real() == doctest::Approx(0.0));
    CHECK(v.imag() == doctest::Approx(0.5));

    CoefficientSeries six({{6, {1.0, 0.0}}}, TruncationPolicy::max_index(6), "");
    TorusPoint wm{{Complex{-1.0, 0.0}, Complex{-1.0, 0.0}}};
    CHECK(evaluate(dilate(six, 1.0), wm).real() == doctest::Approx(1.0));

    // insufficient dimension names the offending key
    try {
        evaluate(dilate(six, 1.0), wi);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("n=6") != std::string::npos);
    }
}

TEST_CASE("mc_norm of a constant is exact with zero stderr") {
    CoefficientSeries c({{1, {2.0, -1.0}}}, TruncationPolicy::max_index(1), "");
    for (double p : {1.0, 2.0, 3.0}) {
        auto est = mc_norm(c, p, 0.7, 100, 5);
        CHECK(est.mean == doctest::Approx(std::pow(std::abs(Complex{2.0, -1.0}), p)).epsilon(1e-12));
        CHECK(est.stderr_ == 0.0);
    }
}

TEST_CASE("mc_norm agrees with the Parseval oracle at p=2") {
    // a single monomial has constant modulus, so the estimate is exact up to
    // rounding and the stderr sits at the rounding floor
    CoefficientSeries f({{2, {1.0, 0.0}}}, TruncationPolicy::max_index(2), "");
    auto est = mc_norm(f, 2.0, 0.7, 10000, 11);
    CHECK(std::abs(est.mean - 0.49) <= 3.0 * est.stderr_ + 1e-12);

    auto est2 = mc_norm(two_term(), 2.0, 0.9, 10000, 12);
    CHECK(std::abs(est2.mean - (0.81 + 0.6561)) <= 3.0 * est2.stderr_);
}

TEST_CASE("mc_norm is bit-deterministic in the seed") {
    auto f = two_term();
    auto a = mc_norm(f, 2.0, 0.9, 4000, 77);
    auto b = mc_norm(f, 2.0, 0.9, 4000, 77);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.to_json().dump() == b.to_json().dump());
    auto c = mc_norm(f, 2.0, 0.9, 4000, 78);
    CHECK(a.mean != c.mean);
}

TEST_CASE("scaling by 2 is an exact per-sample identity") {
    auto f = two_term();
    CoeffMap doubled;
    for (const auto& [n, c] : f.coefficients()) doubled[n] = 2.0 * c;
    CoefficientSeries g(std::move(doubled), f.cutoff(), f.label());
    for (double p : {1.0, 2.0, 4.0}) {
        auto ef = mc_norm(f, p, 0.9, 2000, 5);
        auto eg = mc_norm(g, p, 0.9, 2000, 5);
        CHECK(eg.mean == std::pow(2.0, p) * ef.mean); // bitwise: powers of two
    }
}

TEST_CASE("norm_profile validates its ladder and reuses samples") {
    auto f = two_term();
    CHECK_THROWS_AS(norm_profile(f, 2.0, {}, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(norm_profile(f, 2.0, {0.9, 0.5}, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(norm_profile(f, 2.0, {0.5, 0.5}, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(norm_profile(f, 2.0, {0.5, 1.2}, 100, 1), std::domain_error);
    CHECK_THROWS_AS(norm_profile(f, 0.5, {0.5}, 100, 1), std::domain_error);
    CHECK_THROWS_AS(norm_profile(f, 2.0, {0.5}, 1, 1), std::domain_error);

    // single-rung profile is exactly mc_norm
    auto prof = norm_profile(f, 2.0, {0.5}, 3000, 9);
    auto est = mc_norm(f, 2.0, 0.5, 3000, 9);
    CHECK(prof.size() == 1);
    CHECK(prof[0].mean == est.mean);
    CHECK(prof[0].stderr_ == est.stderr_);
}

TEST_CASE("profile tracks the Parseval oracle and is statistically monotone") {
    auto prof = norm_profile(two_term(), 2.0, {0.5, 0.9}, 10000, 21);
    CHECK(std::abs(prof[0].mean - (0.25 + 0.0625)) <= 3.0 * prof[0].stderr_);
    CHECK(std::abs(prof[1].mean - (0.81 + 0.6561)) <= 3.0 * prof[1].stderr_);
    CHECK(profile_monotone_ok(prof));

    CoefficientSeries c({{1, {1.0, 0.0}}}, TruncationPolicy::max_index(1), "");
    auto flat = norm_profile(c, 1.5, {0.2, 0.5, 0.9}, 100, 3);
    for (const auto& e : flat) CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("unbiasedness at p=2 over 100 fixed seeds") {
    auto f = two_term();
    double exact = 0.81 + 0.6561;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto est = mc_norm(f, 2.0, 0.9, 2000, seed);
        if (std::abs(est.mean - exact) <= 3.0 * est.stderr_) ++hits;
    }
    CHECK(hits >= 99);
}

TEST_CASE("rotation of the first coordinate leaves the norm law invariant") {
    auto f = two_term();
    double r = 0.8;
    auto d = dilate(f, r);
    Complex phase = std::polar(1.0, 1.1);
    RunningStat plain, rotated;
    RngStream torus = RngStream::from_seed(31, "torus");
    RngStream torus2 = RngStream::from_seed(32, "torus");
    const std::uint64_t S = 20000;
    for (std::uint64_t s = 1; s <= S; ++s) {
        RngStream ss = torus.substream(s);
        TorusPoint w = sample_torus(2, ss);
        plain.add(std::norm(evaluate(d, w)));
        RngStream ss2 = torus2.substream(s);
        TorusPoint w2 = sample_torus(2, ss2);
        w2.coords[0] *= phase;
        rotated.add(std::norm(evaluate(d, w2)));
    }
    double gap = std::abs(plain.mean() - rotated.mean());
    double tol = 3.0 * std::hypot(plain.stderr_of_mean(), rotated.stderr_of_mean());
    CHECK(gap <= tol);
}

TEST_CASE("norm estimate JSON and CSV round trip") {
    auto est = mc_norm(two_term(), 2.0, 0.9, 500, 13);
    auto back = NormEstimate::from_json(est.to_json());
    CHECK(back.mean == est.mean);
    CHECK(back.stderr_ == est.stderr_);
    CHECK(back.seed.master == 13);
    CHECK(NormEstimate::csv_header() == "label,p,r,mean,stderr,samples,seed");
    CHECK(est.csv_row().find("two,2,0.9") == 0);
}
