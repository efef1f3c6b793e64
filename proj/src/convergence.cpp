#include "polytorus/convergence.hpp"

#include <cmath>
#include <stdexcept>

#include "polytorus/kahan.hpp"
#include "polytorus/monomial.hpp"

namespace polytorus {

std::string to_string(RootTestVerdict v) {
    switch (v) {
        case RootTestVerdict::converges: return "converges";
        case RootTestVerdict::diverges: return "diverges";
        case RootTestVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

nlohmann::json RootTestReport::to_json() const {
    return nlohmann::json{{"gamma_estimate", gamma_estimate},
                          {"verdict", to_string(verdict)},
                          {"window", {window_lo, window_hi}},
                          {"margin", margin}};
}

RootTestReport root_test(const std::vector<double>& x, std::uint64_t start_index, double margin) {
    if (start_index < 2) throw std::invalid_argument("root test window must exclude n=1");
    if (x.empty()) throw std::invalid_argument("root test window is empty");
    if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
    for (double v : x)
        if (v < 0.0 || !std::isfinite(v))
            throw std::domain_error("root test entries must be nonnegative and finite");

    RootTestReport rep;
    rep.margin = margin;
    rep.window_lo = start_index;
    rep.window_hi = start_index + x.size() - 1;

    std::size_t tail_begin = x.size() / 2; // trailing half convention
    double gamma = 0.0;
    for (std::size_t i = tail_begin; i < x.size(); ++i) {
        std::uint64_t w = weight_of(start_index + i);
        gamma = std::max(gamma, std::pow(x[i], 1.0 / static_cast<double>(w)));
    }
    rep.gamma_estimate = gamma;
    if (gamma < 1.0 - margin)
        rep.verdict = RootTestVerdict::converges;
    else if (gamma > 1.0 + margin)
        rep.verdict = RootTestVerdict::diverges;
    else
        rep.verdict = RootTestVerdict::inconclusive;
    return rep;
}

nlohmann::json WeightSumIdentity::to_json() const {
    return nlohmann::json{{"beta", beta},
                          {"max_weight", max_weight},
                          {"lhs", lhs},
                          {"rhs", rhs},
                          {"tail_bound", tail_bound},
                          {"consistent", consistent()}};
}

std::vector<long double> partition_counts(std::uint64_t max_m) {
    std::vector<long double> p(max_m + 1, 0.0L);
    p[0] = 1.0L;
    for (std::uint64_t j = 1; j <= max_m; ++j)
        for (std::uint64_t m = j; m <= max_m; ++m) p[m] += p[m - j];
    return p;
}

WeightSumIdentity geometric_weight_sum(double beta, std::uint64_t max_weight) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::domain_error("beta must lie strictly inside (0, 1)");
    if (max_weight < 1) throw std::domain_error("weight cutoff must be >= 1");
    if (max_weight > 80)
        throw std::invalid_argument("weight cutoff above 80 is outside the supported desk scale");

    WeightSumIdentity id;
    id.beta = beta;
    id.max_weight = max_weight;

    // lhs by enumerating the exponent patterns of weight <= W
    std::vector<double> beta_pow(max_weight + 1, 1.0);
    for (std::uint64_t j = 1; j <= max_weight; ++j) beta_pow[j] = pow_int(beta, j);
    KahanSum lhs;
    detail::visit_weights(max_weight, [&](std::uint64_t w) { lhs.add(beta_pow[w]); });
    id.lhs = lhs.value();

    // rhs: truncate the product once the missing log-mass drops below 1e-12
    double log_target = std::log(1e-12 * (1.0 - beta));
    auto J = static_cast<std::uint64_t>(std::ceil(log_target / std::log(beta)));
    J = std::max<std::uint64_t>(J, max_weight + 1);
    double rhs = 1.0;
    for (std::uint64_t j = 1; j <= J; ++j) rhs /= 1.0 - pow_int(beta, j);
    id.rhs = rhs;

    // tail bound: explicit partition terms out to M, then a geometric
    // remainder. p(m+1)/p(m) decreases toward 1 for m >= 26, so the last
    // explicit ratio bounds every later one.
    std::uint64_t M = max_weight + 400;
    long double ratio_cap;
    std::vector<long double> parts;
    for (;;) {
        parts = partition_counts(M);
        ratio_cap = static_cast<long double>(beta) * parts[M] / parts[M - 1];
        if (ratio_cap < 0.999L || M > 200000) break;
        M *= 2;
    }
    if (ratio_cap >= 1.0L)
        throw std::runtime_error("tail bound did not close; beta too close to 1");
    long double tail = 0.0L;
    long double bp = powl(static_cast<long double>(beta),
                          static_cast<long double>(max_weight + 1));
    for (std::uint64_t m = max_weight + 1; m <= M; ++m) {
        tail += parts[m] * bp;
        bp *= beta;
    }
    long double last_term = parts[M] * (bp / beta);
    tail += last_term * ratio_cap / (1.0L - ratio_cap);
    id.tail_bound = static_cast<double>(tail * 1.0000000001L); // rounding slack
    return id;
}

} // namespace polytorus
