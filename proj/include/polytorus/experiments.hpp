#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polytorus/dirichlet.hpp"
#include "polytorus/random_model.hpp"

namespace polytorus {

/// Built-in coefficient families, each tagged as square-summable or not.
/// Names: one_over_n, one_over_sqrt_n, one_over_n_log, prime_inverse_sqrt
/// (aliases square_summable -> one_over_n, non_square_summable ->
/// one_over_sqrt_n).
std::vector<std::string> family_names();
bool family_is_l2(const std::string& name);
CoefficientSeries make_family(const std::string& name, const TruncationPolicy& cutoff);

/// Everything that affects an experiment's numbers. The seed is mandatory
/// for stochastic experiments; there is no wall-clock default.
struct ExperimentConfig {
    std::string experiment;
    std::optional<std::string> family;
    std::optional<CoefficientSeries> series;
    std::optional<DirichletPolynomial> dirichlet;
    RandomModel model = RandomModel::bernoulli();
    double p = 2.0;
    std::vector<double> p_list = {1.0, 2.0, 4.0};             // khintchine
    std::vector<double> ladder = {0.5, 0.7, 0.9, 0.95, 0.99}; // r ladder
    double r = 0.9;                                           // moment-style estimates
    std::uint64_t samples = 2000;                             // torus samples per estimate
    std::uint64_t outer = 200, inner = 2000;                  // nested MC budgets
    std::uint64_t realizations = 3;
    std::vector<std::uint64_t> truncations = {100, 1000, 10000}; // dichotomy ladder
    TruncationPolicy truncation = TruncationPolicy::max_index(1000);
    std::vector<double> t_ladder = {100.0, 1000.0, 10000.0}; // bohr
    std::optional<std::uint64_t> seed;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);

    std::uint64_t require_seed() const;
};

/// Reproducible experiment output: the payload is a pure function of the
/// config (re-running with the same config gives byte-identical payload
/// text); timing lives outside the payload.
struct ExperimentReport {
    nlohmann::json payload;
    double wall_ms = 0.0;
    bool pass = true;

    nlohmann::json full_json() const;
    std::string payload_string() const { return payload.dump(2); }
};

/// Boundedness dichotomy experiment: r-profiles of the randomized series
/// across an increasing truncation ladder, with an exact-Parseval oracle
/// track at p = 2 alongside the Monte Carlo track.
///
/// Verdict policy (explicit finite-sample heuristics; the almost-sure
/// statements carry no finite criterion):
///   bounded   <=> at the largest truncation the top-rung estimate is within
///                 10% of the previous rung;
///   divergent <=> the top-rung/previous-rung ratio at the largest
///                 truncation is >= 1.25 and the top-rung value strictly
///                 increases along the truncation ladder.
ExperimentReport run_dichotomy(const ExperimentConfig& config);

/// Moment-equivalence experiment: ratios E||(RF)_[r]||_p^p / (sum |a_n|^2
/// r^{2w})^{p/2} over structurally different probes must sit in [1/4, 4],
/// and at p = 2 within 3 sigma of 1.
ExperimentReport run_khintchine(const ExperimentConfig& config);

/// Mean/centered decomposition for a noncentered Gaussian process: the mean
/// sequence acts as a deterministic coefficient multiplier (exact p = 2
/// profile), the centered part goes through the nested MC moments, and the
/// bounded-mean inequality ||mu . a||_2 <= sup|mu| ||a||_2 is checked.
ExperimentReport run_mean_shift(const ExperimentConfig& config);

/// Bohr-correspondence experiment: time-average vs torus norms across a
/// T-ladder, plus a randomized variant checking that randomization commutes
/// with the lift coefficient-wise (exactly) and in norm (statistically).
ExperimentReport run_bohr(const ExperimentConfig& config);

} // namespace polytorus
