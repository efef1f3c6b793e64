#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "polytorus/monomial.hpp"

namespace polytorus {

using Complex = std::complex<double>;
using CoeffMap = std::map<std::uint64_t, Complex>;

/// Finite truncation of a monomial expansion sum a_n zeta^{alpha(n)}.
/// Coefficients are stored sparsely by n (alpha is recoverable), zeros are
/// dropped, and every key must satisfy the cutoff the series was built with.
/// Immutable after construction.
class CoefficientSeries {
public:
    CoefficientSeries();
    CoefficientSeries(CoeffMap coeffs, TruncationPolicy cutoff, std::string label);

    const CoeffMap& coefficients() const { return coeffs_; }
    const TruncationPolicy& cutoff() const { return cutoff_; }
    const std::string& label() const { return label_; }

    std::size_t term_count() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }
    std::uint64_t max_key() const { return coeffs_.empty() ? 1 : coeffs_.rbegin()->first; }

    /// Number of torus coordinates needed to evaluate this series (the
    /// largest prime position appearing in any key's factorization).
    std::size_t torus_dim() const;

    bool operator==(const CoefficientSeries& other) const {
        return coeffs_ == other.coeffs_ && cutoff_ == other.cutoff_ && label_ == other.label_;
    }

    nlohmann::json to_json() const;
    static CoefficientSeries from_json(const nlohmann::json& j);

private:
    CoeffMap coeffs_;
    TruncationPolicy cutoff_;
    std::string label_;
};

/// A series composed with the graded dilation: coefficient at n becomes
/// a_n * r^{weight(n)}. Coefficients are materialized eagerly.
class DilatedSeries {
public:
    const CoeffMap& coefficients() const { return coeffs_; }
    double r() const { return r_; }
    const CoefficientSeries& base() const { return base_; }
    const std::string& label() const { return base_.label(); }

    /// Rebase the dilated coefficients as a plain series (same cutoff).
    CoefficientSeries as_series() const;

private:
    friend DilatedSeries dilate(const CoefficientSeries&, double);
    DilatedSeries(CoefficientSeries base, double r, CoeffMap coeffs)
        : base_(std::move(base)), r_(r), coeffs_(std::move(coeffs)) {}

    CoefficientSeries base_;
    double r_;
    CoeffMap coeffs_;
};

/// Graded dilation with radius r in (0, 1]; r == 1 is the identity.
/// Throws std::domain_error outside that range.
DilatedSeries dilate(const CoefficientSeries& f, double r);

/// Max relative coefficient discrepancy between dilating twice (r then r2)
/// and dilating once by r*r2. Composition should hold to ~1e-12.
double dilation_compose_error(const CoefficientSeries& f, double r, double r2);

/// Exact l2 norm sqrt(sum |c_n|^2) over the stored coefficients, compensated
/// summation. For a dilated series this is the exact p=2 torus norm.
double norm2_exact(const CoefficientSeries& f);
double norm2_exact(const DilatedSeries& f);

/// Restriction of the coefficients to keys n <= m. Cutoff and label are kept.
CoefficientSeries partial_sum(const CoefficientSeries& f, std::uint64_t m);

/// Bounded coefficient sequence: explicit values plus an optional default.
class Multiplier {
public:
    explicit Multiplier(std::map<std::uint64_t, Complex> values,
                        std::optional<Complex> default_value = std::nullopt)
        : values_(std::move(values)), default_(default_value) {}
    static Multiplier constant(Complex c) { return Multiplier({}, c); }

    /// Value at n; throws std::invalid_argument when n is not covered.
    Complex at(std::uint64_t n) const;
    bool covers(std::uint64_t n) const { return default_.has_value() || values_.count(n) > 0; }

    /// sup |lambda_n| over the keys of f.
    double sup_abs_over(const CoefficientSeries& f) const;

private:
    std::map<std::uint64_t, Complex> values_;
    std::optional<Complex> default_;
};

/// Coefficient-wise product lambda_n * a_n. Every key of f must be covered.
CoefficientSeries multiplier_apply(const Multiplier& lambda, const CoefficientSeries& f);

} // namespace polytorus
