#include <doctest.h>

#include <cmath>

#include "polytorus/kahan.hpp"
#include "polytorus/random_model.hpp"

using namespace polytorus;

namespace {

CoefficientSeries two_term() {
    return CoefficientSeries({{2, {1.0, 0.0}}, {3, {1.0, 0.0}}}, TruncationPolicy::max_index(3),
                             "two");
}

} // namespace

TEST_CASE("bernoulli draws are signs with vanishing mean") {
    RngStream s = RngStream::from_seed(5, "bernoulli");
    auto x = Realization::draw(RandomModel::bernoulli(), 100000, s);
    KahanSum mean;
    for (std::uint64_t n = 1; n <= x.size(); ++n) {
        double v = x.value(n).real();
        CHECK((v == 1.0 || v == -1.0));
        mean.add(v);
    }
    CHECK(std::abs(mean.value()) / 100000.0 < 0.01); // 3/sqrt(N) oracle
}

TEST_CASE("steinhaus draws are unimodular") {
    RngStream s = RngStream::from_seed(6, "steinhaus");
    auto x = Realization::draw(RandomModel::steinhaus(), 500, s);
    for (std::uint64_t n = 1; n <= x.size(); ++n)
        CHECK(std::abs(std::abs(x.value(n)) - 1.0) < 1e-12);
}

TEST_CASE("identity-covariance process has unit coordinate variance") {
    auto model = RandomModel::gaussian_process_diag(std::vector<double>(4, 0.0),
                                                    std::vector<double>(4, 1.0));
    RngStream s = RngStream::from_seed(7, "gaussian");
    RunningStat coord;
    for (std::uint64_t d = 1; d <= 10000; ++d) {
        auto x = Realization::draw(model, 4, s.substream(d));
        for (std::uint64_t n = 1; n <= 4; ++n) {
            double v = x.value(n).real();
            coord.add(v * v);
        }
    }
    CHECK(coord.mean() == doctest::Approx(1.0).epsilon(0.05)); // chi^2 concentration
}

TEST_CASE("prefixes of contiguous draws agree with sparse draws") {
    auto model = RandomModel::gaussian_iid();
    RngStream s = RngStream::from_seed(8, "gaussian");
    auto full = Realization::draw(model, 100, s);
    auto sparse = Realization::draw_at(model, {3, 17, 64}, s);
    for (std::uint64_t n : {3ULL, 17ULL, 64ULL}) CHECK(full.value(n) == sparse.value(n));
    CHECK_FALSE(sparse.covers(4));
    CHECK_THROWS_AS(sparse.value(4), std::invalid_argument);
    CHECK_THROWS_AS(Realization::draw_at(model, {5, 5}, s), std::invalid_argument);
    auto gp = RandomModel::gaussian_process_diag({0.0}, {1.0});
    CHECK_THROWS_AS(Realization::draw_at(gp, {1}, s), std::invalid_argument);
    CHECK_THROWS_AS(Realization::draw(gp, 2, s), std::invalid_argument);
}

TEST_CASE("covariance factorization: closed forms") {
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    auto fi = covariance_factor(I);
    CHECK_FALSE(fi.clipped);
    CHECK((fi.L - I).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::MatrixXd K(2, 2);
    K << 4, 2, 2, 2;
    auto fk = covariance_factor(K);
    CHECK(fk.L(0, 0) == doctest::Approx(2.0)); // hand Cholesky oracle [[2,0],[1,1]]
    CHECK(fk.L(0, 1) == doctest::Approx(0.0));
    CHECK(fk.L(1, 0) == doctest::Approx(1.0));
    CHECK(fk.L(1, 1) == doctest::Approx(1.0));

    Eigen::MatrixXd D = Eigen::Vector3d(4.0, 9.0, 0.25).asDiagonal();
    auto fd = covariance_factor(D);
    CHECK(fd.L(0, 0) == doctest::Approx(2.0));
    CHECK(fd.L(1, 1) == doctest::Approx(3.0));
    CHECK(fd.L(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("covariance factorization: error paths and clipping") {
    Eigen::MatrixXd A(2, 2);
    A << 1, 0.5, 0.2, 1; // asymmetric
    CHECK_THROWS_AS(covariance_factor(A), std::invalid_argument);

    Eigen::MatrixXd neg(2, 2);
    neg << 1, 0, 0, -0.5; // genuinely indefinite
    CHECK_THROWS_AS(covariance_factor(neg), std::domain_error);

    Eigen::MatrixXd rank1(2, 2);
    rank1 << 1, 1, 1, 1; // PSD, rank deficient
    auto fr = covariance_factor(rank1);
    CHECK((fr.L * fr.L.transpose() - rank1).cwiseAbs().maxCoeff() < 1e-8);

    // slightly indefinite within tolerance: repaired with the clipped flag
    Eigen::MatrixXd near = rank1;
    near(0, 0) -= 5e-11;
    auto fn = covariance_factor(near);
    CHECK((fn.L * fn.L.transpose() - rank1).cwiseAbs().maxCoeff() < 1e-8);

    Eigen::MatrixXd big = Eigen::MatrixXd::Identity(2001, 2001);
    CHECK_THROWS_AS(covariance_factor(big), std::invalid_argument);
}

TEST_CASE("factor correctness on random PSD matrices") {
    RngStream rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 3 + static_cast<int>(rng.next_u64() % 20);
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.next_unit() - 1.0;
        Eigen::MatrixXd K = A.transpose() * A;
        auto f = covariance_factor(K);
        double err = (f.L * f.L.transpose() - K).cwiseAbs().maxCoeff();
        CHECK(err <= 1e-8 * K.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("randomize is isometric for unimodular models") {
    auto f = two_term();
    RngStream s = RngStream::from_seed(9, "bernoulli");
    auto xb = Realization::draw(RandomModel::bernoulli(), 3, s);
    CHECK(norm2_exact(randomize(f, xb)) == norm2_exact(f));
    RngStream s2 = RngStream::from_seed(9, "steinhaus");
    auto xs = Realization::draw(RandomModel::steinhaus(), 3, s2);
    CHECK(norm2_exact(randomize(f, xs)) == doctest::Approx(norm2_exact(f)).epsilon(1e-15));

    Realization ones(ModelKind::bernoulli, {}, std::vector<Complex>(3, {1.0, 0.0}));
    CHECK(randomize(f, ones) == f);

    Realization shorty(ModelKind::bernoulli, {}, std::vector<Complex>(2, {1.0, 0.0}));
    CHECK_THROWS_AS(randomize(f, shorty), std::invalid_argument);
}

TEST_CASE("randomized_moment closed forms") {
    CoefficientSeries constant({{1, {1.0, 0.0}}}, TruncationPolicy::max_index(1), "c");
    auto m = randomized_moment(constant, RandomModel::bernoulli(), 2.0, 0.5, 10, 10, 3);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.stderr_ == doctest::Approx(0.0));

    // E X^2 = 1: within 3 sigma of r^2 + r^4 at r = 0.9
    auto g = randomized_moment(two_term(), RandomModel::gaussian_iid(), 2.0, 0.9, 300, 500, 4);
    CHECK(std::abs(g.mean - 1.4661) <= 3.0 * g.stderr_);

    // scalar Gaussian process with variance 4 on the single key 2
    auto model = RandomModel::gaussian_process_diag({0.0, 0.0}, {1.0, 4.0});
    CoefficientSeries single({{2, {1.0, 0.0}}}, TruncationPolicy::max_index(2), "s");
    auto h = randomized_moment(single, model, 2.0, 0.5, 400, 10, 5);
    CHECK(std::abs(h.mean - 1.0) <= 3.0 * h.stderr_); // 4 * 0.25

    CHECK_THROWS_AS(randomized_moment(two_term(), model, 2.0, 0.5, 10, 10, 1),
                    std::invalid_argument); // dimension 2 does not cover key 3
    CHECK_THROWS_AS(randomized_moment(two_term(), RandomModel::bernoulli(), 2.0, 0.5, 1, 10, 1),
                    std::domain_error);
}

TEST_CASE("sign flip symmetry is bit exact") {
    auto f = two_term();
    RngStream s = RngStream::from_seed(10, "gaussian");
    auto x = Realization::draw(RandomModel::gaussian_iid(), 3, s);
    std::vector<Complex> flipped;
    for (std::uint64_t n = 1; n <= 3; ++n) flipped.push_back(-x.value(n));
    Realization xneg(ModelKind::gaussian_iid, {}, flipped);
    auto a = mc_norm(randomize(f, x), 2.0, 0.9, 1000, 6);
    auto b = mc_norm(randomize(f, xneg), 2.0, 0.9, 1000, 6);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("closed-form second moment for diagonal covariance") {
    // sum |a_n|^2 sigma_n^2 r^{2 weight(n)} oracle
    CoefficientSeries f({{2, {1.0, 0.0}}, {3, {2.0, 0.0}}, {5, {1.0, 0.0}}},
                        TruncationPolicy::max_index(5), "diag");
    std::vector<double> var = {1.0, 2.0, 3.0, 4.0, 5.0};
    auto model = RandomModel::gaussian_process_diag(std::vector<double>(5, 0.0), var);
    double r = 0.9;
    double oracle = 0.0;
    for (const auto& [n, c] : f.coefficients())
        oracle += std::norm(c) * var[n - 1] * std::pow(r, 2.0 * weight_of(n));
    auto m = randomized_moment(f, model, 2.0, r, 400, 400, 8);
    CHECK(std::abs(m.mean - oracle) <= 3.0 * m.stderr_);
}

TEST_CASE("operator norm probes: closed form and growth") {
    CoefficientSeries p2({{2, {1.0, 0.0}}}, TruncationPolicy::max_index(2), "n2");
    double r = 0.9;
    auto rep = operator_norm_estimate(RandomModel::gaussian_iid(), 2.0, {p2}, r, 400, 5, 12);
    CHECK(rep.rows.size() == 1);
    CHECK(std::abs(rep.rows[0].ratio - r) <= 3.0 * rep.rows[0].ratio_stderr);
    CHECK_FALSE(rep.noncentered_warning);

    // Bernoulli at p=2: the ratio is the dilated-norm ratio exactly
    auto rb = operator_norm_estimate(RandomModel::bernoulli(), 2.0, {p2}, r, 50, 5, 12);
    CHECK(rb.rows[0].ratio == doctest::Approx(r).epsilon(1e-12));

    // bounded K = I versus growing K = diag(n)
    std::vector<CoefficientSeries> probes;
    for (std::uint64_t n : {2ULL, 4ULL, 16ULL, 64ULL}) {
        probes.push_back(CoefficientSeries({{n, {1.0, 0.0}}}, TruncationPolicy::max_index(n),
                                           "probe_" + std::to_string(n)));
    }
    std::vector<double> growing(64), ones(64, 1.0);
    for (std::size_t i = 0; i < 64; ++i) growing[i] = static_cast<double>(i + 1);
    auto bounded = operator_norm_estimate(
        RandomModel::gaussian_process_diag(std::vector<double>(64, 0.0), ones), 2.0, probes, r,
        200, 5, 13);
    auto unbounded = operator_norm_estimate(
        RandomModel::gaussian_process_diag(std::vector<double>(64, 0.0), growing), 2.0, probes, r,
        200, 5, 13);
    CHECK(bounded.max_ratio < 1.5);
    CHECK(unbounded.rows.back().ratio > 2.0 * unbounded.rows.front().ratio);

    CHECK_THROWS_AS(operator_norm_estimate(RandomModel::bernoulli(), 2.0, {}, r, 10, 10, 1),
                    std::invalid_argument);
    CoefficientSeries zero;
    CHECK_THROWS_AS(operator_norm_estimate(RandomModel::bernoulli(), 2.0, {zero}, r, 10, 10, 1),
                    std::invalid_argument);

    auto noncentered = RandomModel::gaussian_process_diag({1.0, 1.0}, {1.0, 1.0});
    auto rw = operator_norm_estimate(noncentered, 2.0, {p2}, r, 10, 5, 1);
    CHECK(rw.noncentered_warning);
}

TEST_CASE("root limit diagnostics on synthetic realizations") {
    std::vector<Complex> ones(99, {1.0, 0.0});
    Realization x1(ModelKind::gaussian_iid, {}, ones);
    // window [2, 100] within a contiguous draw starting at 1: use values 2..99
    auto rep = root_limit_diagnostic(x1, 2, 99);
    CHECK(rep.min_value == doctest::Approx(1.0));
    CHECK(rep.max_value == doctest::Approx(1.0));
    CHECK(rep.max_deviation == doctest::Approx(0.0));

    // X_n = 2^{weight(n)} makes every root exactly 2
    std::vector<Complex> geo;
    for (std::uint64_t n = 1; n <= 50; ++n) geo.push_back({pow_int(2.0, weight_of(n)), 0.0});
    Realization x2(ModelKind::gaussian_iid, {}, geo);
    auto rep2 = root_limit_diagnostic(x2, 2, 50);
    CHECK(rep2.min_value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep2.max_value == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(root_limit_diagnostic(x1, 1, 50), std::invalid_argument);
    CHECK(!rep2.per_weight.empty());
}

TEST_CASE("gaussian tail bound formulas") {
    auto b1 = gaussian_tail_bound(1.0);
    REQUIRE(b1.upper_tail.has_value());
    CHECK(*b1.upper_tail == doctest::Approx(0.48394144903828673).epsilon(1e-12));
    CHECK(std::erfc(1.0 / std::sqrt(2.0)) < *b1.upper_tail); // true tail 0.31731 below the bound

    auto b0 = gaussian_tail_bound(0.0);
    CHECK_FALSE(b0.upper_tail.has_value());
    CHECK(b0.small_ball == 0.0);

    CHECK_THROWS_AS(gaussian_tail_bound(-1.0), std::domain_error);
}

TEST_CASE("model JSON round trip") {
    auto j = RandomModel::gaussian_process_diag({0.5, -0.5}, {1.0, 2.0}).to_json();
    CHECK(j.at("covariance").contains("diag"));
    auto back = RandomModel::from_json(j);
    CHECK(back.kind() == ModelKind::gaussian_process);
    CHECK(back.mean() == std::vector<double>{0.5, -0.5});

    auto full = RandomModel::from_json(
        {{"kind", "gaussian_process"}, {"mean", {0.0, 0.0}}, {"covariance", {{4.0, 2.0}, {2.0, 2.0}}}});
    CHECK(full.factor()(0, 0) == doctest::Approx(2.0));

    CHECK(RandomModel::from_json({{"kind", "bernoulli"}}).kind() == ModelKind::bernoulli);
    CHECK_THROWS_AS(RandomModel::from_json({{"kind", "cauchy"}}), std::invalid_argument);
}
