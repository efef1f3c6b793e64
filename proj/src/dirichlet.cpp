#include "polytorus/dirichlet.hpp"

#include <cmath>
#include <stdexcept>

#include "polytorus/kahan.hpp"

namespace polytorus {

DirichletPolynomial::DirichletPolynomial(std::map<std::uint64_t, Complex> terms) {
    for (auto& [n, a] : terms) {
        if (n == 0) throw std::domain_error("Dirichlet terms must have positive index");
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw std::invalid_argument("Dirichlet coefficients must be finite");
        if (a == Complex{}) continue;
        terms_.emplace(n, a);
    }
}

nlohmann::json DirichletPolynomial::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [n, a] : terms_) rows.push_back(nlohmann::json::array({n, a.real(), a.imag()}));
    return nlohmann::json{{"terms", rows}};
}

DirichletPolynomial DirichletPolynomial::from_json(const nlohmann::json& j) {
    std::map<std::uint64_t, Complex> terms;
    for (const auto& row : j.at("terms")) {
        if (!row.is_array() || row.size() != 3)
            throw std::invalid_argument("Dirichlet term rows must be [n, re, im]");
        if (row[0].is_number_integer() && row[0].get<long long>() <= 0)
            throw std::domain_error("Dirichlet terms must have positive index");
        terms.emplace(row[0].get<std::uint64_t>(),
                      Complex{row[1].get<double>(), row[2].get<double>()});
    }
    return DirichletPolynomial(std::move(terms));
}

Complex evaluate_dirichlet(const DirichletPolynomial& q, Complex s) {
    KahanComplexSum acc;
    for (const auto& [n, a] : q.terms())
        acc.add(a * std::exp(-s * std::log(static_cast<double>(n))));
    return acc.value();
}

DirichletPolynomial vertical_translate(const DirichletPolynomial& q, double sigma) {
    std::map<std::uint64_t, Complex> out;
    for (const auto& [n, a] : q.terms())
        out.emplace(n, a * std::exp(-sigma * std::log(static_cast<double>(n))));
    return DirichletPolynomial(std::move(out));
}

CoefficientSeries bohr_lift(const DirichletPolynomial& q) {
    CoeffMap coeffs(q.terms().begin(), q.terms().end());
    return CoefficientSeries(std::move(coeffs), TruncationPolicy::max_index(q.max_key()),
                             "bohr_lift");
}

DirichletPolynomial bohr_inverse(const CoefficientSeries& f) {
    std::map<std::uint64_t, Complex> terms(f.coefficients().begin(), f.coefficients().end());
    return DirichletPolynomial(std::move(terms));
}

nlohmann::json BesicovitchEstimate::to_json() const {
    return nlohmann::json{{"value", value},   {"mean_p", mean_p},
                          {"p", p},           {"T", T},
                          {"step", step},     {"max_frequency", max_frequency},
                          {"points", points}};
}

double besicovitch_default_step(const DirichletPolynomial& q) {
    std::uint64_t maxkey = q.max_key();
    if (maxkey <= 1) return 0.1;
    return std::min(0.1, RngStream::pi() / (5.0 * std::log(static_cast<double>(maxkey))));
}

BesicovitchEstimate besicovitch_norm(const DirichletPolynomial& q, double p, double T,
                                     double step) {
    if (p < 1.0) throw std::domain_error("p must be >= 1");
    if (T < 10.0) throw std::domain_error("averaging half-length T must be >= 10");
    double max_step = besicovitch_default_step(q);
    if (!(step > 0.0) || step > max_step * (1.0 + 1e-12))
        throw std::domain_error("quadrature step must lie in (0, min(0.1, pi/(5 ln max_n))]");

    // precompute the frequencies once
    std::vector<double> logn;
    std::vector<Complex> coeff;
    logn.reserve(q.terms().size());
    for (const auto& [n, a] : q.terms()) {
        logn.push_back(std::log(static_cast<double>(n)));
        coeff.push_back(a);
    }

    auto panels = static_cast<std::uint64_t>(std::ceil(2.0 * T / step));
    double h = 2.0 * T / static_cast<double>(panels);
    KahanSum acc;
    for (std::uint64_t i = 0; i <= panels; ++i) {
        double t = -T + h * static_cast<double>(i);
        KahanComplexSum val;
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            double phase = -t * logn[k]; // n^{-it} = e^{-it ln n}
            val.add(coeff[k] * Complex{std::cos(phase), std::sin(phase)});
        }
        double f = detail::pow_abs(val.value(), p);
        acc.add((i == 0 || i == panels) ? 0.5 * f : f);
    }

    BesicovitchEstimate est;
    est.p = p;
    est.T = T;
    est.step = h;
    est.points = panels + 1;
    est.max_frequency = q.max_key() > 1 ? std::log(static_cast<double>(q.max_key())) : 0.0;
    est.mean_p = acc.value() * h / (2.0 * T);
    est.value = est.mean_p > 0.0 ? std::pow(est.mean_p, 1.0 / p) : 0.0;
    return est;
}

nlohmann::json IsometryReport::to_json() const {
    return nlohmann::json{{"besicovitch_pp", besicovitch_pp},
                          {"quad_uncertainty", quad_uncertainty},
                          {"torus", torus.to_json()},
                          {"diff", diff},
                          {"tolerance", tolerance},
                          {"pass", pass}};
}

IsometryReport isometry_check(const DirichletPolynomial& q, double p, double T,
                              std::uint64_t samples, std::uint64_t seed) {
    if (T < 20.0) throw std::domain_error("isometry check needs T >= 20 (uses T and T/2)");
    double step = besicovitch_default_step(q);
    BesicovitchEstimate full = besicovitch_norm(q, p, T, step);
    BesicovitchEstimate half = besicovitch_norm(q, p, T / 2.0, step);

    IsometryReport rep;
    rep.besicovitch_pp = full.mean_p;
    rep.quad_uncertainty =
        std::abs(full.mean_p - half.mean_p) + 1e-9 * (1.0 + std::abs(full.mean_p));
    rep.torus = mc_norm(bohr_lift(q), p, 1.0, samples, seed);
    rep.diff = std::abs(full.mean_p - rep.torus.mean);
    rep.tolerance = rep.quad_uncertainty + 3.0 * rep.torus.stderr_;
    rep.pass = rep.diff <= rep.tolerance;
    return rep;
}

} // namespace polytorus
