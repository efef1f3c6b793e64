#pragma once

#include <vector>

#include <json.hpp>

#include "polytorus/rng.hpp"
#include "polytorus/series.hpp"

namespace polytorus {

/// Finitely many materialized coordinates of a point on the infinite torus;
/// coordinate j corresponds to the j-th prime. Coordinates beyond dim
/// integrate out exactly under the product Haar measure, so a point only
/// needs to cover the prime positions a series actually uses.
struct TorusPoint {
    std::vector<Complex> coords;
    std::size_t dim() const { return coords.size(); }
};

/// Haar sample: each coordinate independent and uniform on the unit circle.
TorusPoint sample_torus(std::size_t dim, RngStream& stream);

/// Finite monomial sum  sum_n c_n w^{alpha(n)}  with compensated summation.
/// Throws std::invalid_argument naming the offending n when w has too few
/// coordinates.
Complex evaluate(const DilatedSeries& f, const TorusPoint& w);

/// Monte Carlo estimate of the p-th power mean ||F_[r]||_p^p.
struct NormEstimate {
    double p = 2.0;
    double r = 1.0;
    double mean = 0.0;    // estimate of ||F_[r]||_p^p
    double stderr_ = 0.0; // standard error of the mean
    std::uint64_t samples = 0;
    SeedRecord seed;
    std::string label;

    nlohmann::json to_json() const;
    static NormEstimate from_json(const nlohmann::json& j);
    std::string csv_row() const;           // label,p,r,mean,stderr,samples,seed
    static std::string csv_header();
};

/// One Haar-sampled mean of |F_[r]|^p. Deterministic in (series, p, r,
/// samples, seed): sample s draws from substream s of the "torus" stream, so
/// the result does not depend on how the samples are partitioned.
NormEstimate mc_norm(const CoefficientSeries& f, double p, double r, std::uint64_t samples,
                     std::uint64_t seed);

/// Estimates along a strictly increasing r-ladder, reusing the same torus
/// samples for every rung (common random numbers). With a single rung this
/// is exactly mc_norm.
std::vector<NormEstimate> norm_profile(const CoefficientSeries& f, double p,
                                       const std::vector<double>& ladder, std::uint64_t samples,
                                       std::uint64_t seed);

/// Statistical monotonicity check for a profile computed with common random
/// numbers: each successive mean must be >= previous - 3 * combined stderr.
bool profile_monotone_ok(const std::vector<NormEstimate>& profile);

/// Coefficient bound diagnostic: dilated coefficients are bounded by the
/// dilated norm, so max_n |a_n r^{weight(n)}| should not exceed the
/// estimate's upper confidence bound (mean + 3 stderr)^{1/p}.
struct CoeffBoundReport {
    double max_dilated_coeff = 0.0;
    std::uint64_t argmax_n = 1;
    double norm_upper_confidence = 0.0;
    bool violation = false;
    nlohmann::json to_json() const;
};

/// Throws std::invalid_argument when the estimate's label does not match the
/// series (provenance mismatch).
CoeffBoundReport coeff_bound_check(const CoefficientSeries& f, const NormEstimate& estimate);

namespace detail {

/// Flattened series representation for the sampling hot path: coefficient,
/// weight, and the nonzero prime exponents of each term.
struct CompiledSeries {
    struct Term {
        Complex a;
        std::uint64_t n;
        std::uint64_t weight;
        std::uint32_t factor_begin, factor_end;
    };
    std::vector<Term> terms;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors; // (coord, exponent)
    std::vector<std::uint32_t> max_exp;                           // per coordinate
    std::vector<std::uint32_t> pow_offset;                        // into the power table
    std::size_t dim = 0;
    std::size_t pow_size = 0;

    static CompiledSeries build(const CoeffMap& coeffs);
    void power_table(const TorusPoint& w, std::vector<Complex>& pows) const;
    /// Monomial values w^{alpha(n)} per term, using a prepared power table.
    void monomials(const std::vector<Complex>& pows, std::vector<Complex>& out) const;
};

double pow_abs(Complex z, double p);

} // namespace detail

} // namespace polytorus
