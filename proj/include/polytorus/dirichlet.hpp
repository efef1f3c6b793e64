#pragma once

#include <map>

#include <json.hpp>

#include "polytorus/torus_norm.hpp"

namespace polytorus {

/// Finite Dirichlet sum  sum a_n n^{-s}  with complex evaluation everywhere.
class DirichletPolynomial {
public:
    DirichletPolynomial() = default;
    explicit DirichletPolynomial(std::map<std::uint64_t, Complex> terms);

    const std::map<std::uint64_t, Complex>& terms() const { return terms_; }
    std::uint64_t max_key() const { return terms_.empty() ? 1 : terms_.rbegin()->first; }
    bool empty() const { return terms_.empty(); }

    bool operator==(const DirichletPolynomial& other) const { return terms_ == other.terms_; }

    nlohmann::json to_json() const; // {"terms": [[n, re, im], ...]}
    static DirichletPolynomial from_json(const nlohmann::json& j);

private:
    std::map<std::uint64_t, Complex> terms_;
};

Complex evaluate_dirichlet(const DirichletPolynomial& q, Complex s);

/// Coefficient at n becomes a_n * n^{-sigma}.
DirichletPolynomial vertical_translate(const DirichletPolynomial& q, double sigma);

/// The coefficient map reinterpreted as a monomial series via the prime
/// factorization of the index (and back). Mutual inverses on polynomials.
CoefficientSeries bohr_lift(const DirichletPolynomial& q);
DirichletPolynomial bohr_inverse(const CoefficientSeries& f);

/// Trapezoid estimate of ((1/2T) int_{-T}^{T} |Q(it)|^p dt)^{1/p}.
/// The step must resolve the fastest oscillation: step <= min(0.1,
/// pi / (5 ln(max key))); T must be >= 10.
struct BesicovitchEstimate {
    double value = 0.0;  // the norm estimate
    double mean_p = 0.0; // the p-th power time average
    double p = 2.0;
    double T = 0.0;
    double step = 0.0;
    double max_frequency = 0.0; // fastest angular frequency ln(max key)
    std::uint64_t points = 0;
    nlohmann::json to_json() const;
};

BesicovitchEstimate besicovitch_norm(const DirichletPolynomial& q, double p, double T,
                                     double step);

/// Largest admissible quadrature step for q (the precondition bound).
double besicovitch_default_step(const DirichletPolynomial& q);

/// Compare the time-average norm of Q against the Haar-measure norm of its
/// lift at r = 1. The tolerance combines an empirical quadrature uncertainty
/// (spread between T and T/2) with 3x the Monte Carlo standard error.
struct IsometryReport {
    double besicovitch_pp = 0.0;
    double quad_uncertainty = 0.0;
    NormEstimate torus;
    double diff = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    nlohmann::json to_json() const;
};

IsometryReport isometry_check(const DirichletPolynomial& q, double p, double T,
                              std::uint64_t samples, std::uint64_t seed);

} // namespace polytorus
