#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace polytorus {

/// Finite-window shadow of the weighted root test. The limsup is not
/// finitely computable, so gamma is taken as the max of x_n^{1/weight(n)}
/// over the trailing half of the window and compared against 1 with an
/// explicit margin.
enum class RootTestVerdict { converges, diverges, inconclusive };

std::string to_string(RootTestVerdict v);

struct RootTestReport {
    double gamma_estimate = 0.0;
    RootTestVerdict verdict = RootTestVerdict::inconclusive;
    std::uint64_t window_lo = 0, window_hi = 0;
    double margin = 0.05;
    nlohmann::json to_json() const;
};

/// x holds the values x_n for n = start_index .. start_index+x.size()-1.
/// start_index must be >= 2 (n = 1 has weight 0); entries must be >= 0.
RootTestReport root_test(const std::vector<double>& x, std::uint64_t start_index,
                         double margin = 0.05);

/// Weight-graded geometric sum against its product form:
///   lhs  = sum over monomials with weight <= W of beta^{weight}
///   rhs  = prod_{j<=J} (1 - beta^j)^{-1}, J chosen so the truncated product
///          has relative error below 1e-12
///   tail = certified upper bound on the mass lhs is missing (partition
///          counts times beta^m for m > W, closed off with a geometric
///          remainder from the log-concavity of the partition numbers).
struct WeightSumIdentity {
    double beta = 0.0;
    std::uint64_t max_weight = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double tail_bound = 0.0;
    nlohmann::json to_json() const;
    bool consistent() const { return std::abs(lhs - rhs) <= tail_bound + 1e-10; }
};

WeightSumIdentity geometric_weight_sum(double beta, std::uint64_t max_weight);

/// Partition numbers p(0..max_m) (coefficients of prod 1/(1-x^j)); exact as
/// long as they fit the long double mantissa, which covers every desk-scale
/// use here.
std::vector<long double> partition_counts(std::uint64_t max_m);

} // namespace polytorus
