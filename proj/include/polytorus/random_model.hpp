#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "polytorus/torus_norm.hpp"

namespace polytorus {

enum class ModelKind { bernoulli, steinhaus, gaussian_iid, gaussian_process };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// Result of factoring a covariance matrix: L with L L^T == K (up to the
/// clipping of eigenvalues in [-tol, 0), reported via `clipped`).
struct CovarianceFactor {
    Eigen::MatrixXd L;
    bool clipped = false;
};

/// Lower-triangular Cholesky factor when K is positive definite; otherwise a
/// clipped spectral factor V sqrt(max(lambda, 0)). Throws std::invalid_argument
/// for non-square/asymmetric input and std::domain_error when an eigenvalue
/// falls below -1e-10 * ||K||_max.
CovarianceFactor covariance_factor(const Eigen::MatrixXd& K);

/// Coefficient randomization model: one of the standard sequences
/// (iid Bernoulli signs, Steinhaus phases, Gaussian N(0,1)) or a finite
/// Gaussian process with mean vector and covariance matrix.
class RandomModel {
public:
    static RandomModel bernoulli();
    static RandomModel steinhaus();
    static RandomModel gaussian_iid();
    static RandomModel gaussian_process(std::vector<double> mean, Eigen::MatrixXd covariance);
    static RandomModel gaussian_process_diag(std::vector<double> mean,
                                             std::vector<double> variances);

    ModelKind kind() const { return kind_; }
    /// Process dimension; empty for the unbounded iid models.
    std::optional<std::size_t> dimension() const;
    bool centered() const;
    bool clipped() const { return clipped_; }
    const std::vector<double>& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }
    const Eigen::MatrixXd& factor() const { return factor_; }

    /// Same process with the mean removed (factor reused, not recomputed).
    RandomModel centered_copy() const;

    /// Named RNG stream this model draws from.
    std::string stream_label() const;

    nlohmann::json to_json() const;
    static RandomModel from_json(const nlohmann::json& j);

private:
    explicit RandomModel(ModelKind kind) : kind_(kind) {}
    ModelKind kind_;
    std::vector<double> mean_;
    Eigen::MatrixXd cov_, factor_;
    bool clipped_ = false;
    bool diag_input_ = false;
};

/// One drawn realization X_1..X_N (or values over an explicit sparse index
/// set for the iid models). Values are stored as reals except for Steinhaus.
class Realization {
public:
    /// Contiguous draw covering n = 1..N. For the iid models the value at
    /// index n comes from substream n, so prefixes of longer draws agree.
    static Realization draw(const RandomModel& model, std::uint64_t N, const RngStream& stream);

    /// Sparse draw over strictly increasing indices (iid models only);
    /// coincides with the contiguous draw at the same indices.
    static Realization draw_at(const RandomModel& model, std::vector<std::uint64_t> indices,
                               const RngStream& stream);

    /// Synthetic realization for diagnostics/tests.
    Realization(ModelKind kind, std::vector<std::uint64_t> indices, std::vector<Complex> values);

    ModelKind kind() const { return kind_; }
    std::size_t size() const { return values_.size(); }
    bool contiguous() const { return indices_.empty(); }
    const std::vector<std::uint64_t>& indices() const { return indices_; }

    bool covers(std::uint64_t n) const;
    Complex value(std::uint64_t n) const; // throws when n is not covered

private:
    Realization() = default;
    ModelKind kind_ = ModelKind::bernoulli;
    std::vector<std::uint64_t> indices_; // empty => contiguous 1..size()
    std::vector<Complex> values_;
};

/// Coefficient-wise product a_n * X_n. X must cover every key of f.
CoefficientSeries randomize(const CoefficientSeries& f, const Realization& x);

/// Nested Monte Carlo estimate of E ||(R F)_[r]||_p^p: outer draws of the
/// model, inner Haar samples per draw. The standard error comes from the
/// across-draw variance, which by total-variance dominates the inner noise.
struct MomentEstimate {
    double p = 2.0;
    double r = 1.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double mean_inner_stderr = 0.0;
    std::uint64_t outer = 0, inner = 0;
    SeedRecord seed;
    std::string label;
    nlohmann::json to_json() const;
};

MomentEstimate randomized_moment(const CoefficientSeries& f, const RandomModel& model, double p,
                                 double r, std::uint64_t outer, std::uint64_t inner,
                                 std::uint64_t seed);

/// Empirical operator-norm probe: for each probe F, estimate
/// (E ||(R F)_[r]||_p^2)^{1/2} / ||F||_2 by nested MC (per-draw p-th moments
/// raised to the 2/p power). Draws and torus samples are shared across
/// probes so the reported ratios are directly comparable.
struct OperatorNormRow {
    std::string label;
    double norm2 = 0.0;
    double lifted_mean = 0.0; // E est^{2/p}
    double lifted_stderr = 0.0;
    double ratio = 0.0;
    double ratio_stderr = 0.0;
};

struct OperatorNormReport {
    std::vector<OperatorNormRow> rows;
    double max_ratio = 0.0;
    bool noncentered_warning = false;
    double p = 2.0, r = 1.0;
    std::uint64_t outer = 0, inner = 0;
    SeedRecord seed;
    nlohmann::json to_json() const;
};

OperatorNormReport operator_norm_estimate(const RandomModel& model, double p,
                                          const std::vector<CoefficientSeries>& probes, double r,
                                          std::uint64_t outer, std::uint64_t inner,
                                          std::uint64_t seed);

/// Statistics of |X_n|^{1/weight(n)} over a set of indices (all with
/// weight >= 1, i.e. n >= 2).
struct RootLimitBandStat {
    std::uint64_t weight = 0;
    double min_value = 0.0, max_value = 0.0, max_deviation = 0.0;
    std::uint64_t count = 0;
};

struct RootLimitReport {
    double min_value = 0.0, max_value = 0.0, max_deviation = 0.0;
    std::uint64_t count = 0;
    std::vector<RootLimitBandStat> per_weight;
    nlohmann::json to_json() const;
};

/// Core statistic over explicit (n, |X_n|) pairs.
RootLimitReport root_limit_stats(const std::vector<std::pair<std::uint64_t, double>>& abs_by_n);

/// Convenience over a contiguous index window [lo, hi]; lo must be >= 2.
RootLimitReport root_limit_diagnostic(const Realization& x, std::uint64_t lo, std::uint64_t hi);

/// Standard-normal tail bounds: P(|X| >= x) <= sqrt(2/pi) e^{-x^2/2}
/// (reported for x >= 1 only) and P(|X| <= x) <= sqrt(2/pi) x.
struct GaussianTailBound {
    std::optional<double> upper_tail;
    double small_ball = 0.0;
};

GaussianTailBound gaussian_tail_bound(double x);

} // namespace polytorus
