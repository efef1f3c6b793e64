#include "polytorus/series.hpp"

#include <cmath>
#include <stdexcept>

#include "polytorus/kahan.hpp"

namespace polytorus {

CoefficientSeries::CoefficientSeries()
    : cutoff_(TruncationPolicy::max_index(1)), label_("") {}

CoefficientSeries::CoefficientSeries(CoeffMap coeffs, TruncationPolicy cutoff, std::string label)
    : cutoff_(cutoff), label_(std::move(label)) {
    for (auto& [n, c] : coeffs) {
        if (n == 0) throw std::domain_error("series keys must be positive integers");
        if (c == Complex{}) continue;
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("series coefficients must be finite");
        if (!cutoff_.admits(n))
            throw std::invalid_argument("key " + std::to_string(n) +
                                        " violates cutoff " + cutoff_.to_string());
        coeffs_.emplace(n, c);
    }
}

std::size_t CoefficientSeries::torus_dim() const {
    std::size_t dim = 0;
    for (const auto& [n, c] : coeffs_) {
        (void)c;
        dim = std::max(dim, factorize(n).alpha.size());
    }
    return dim;
}

nlohmann::json CoefficientSeries::to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& [n, c] : coeffs_)
        coeffs.push_back(nlohmann::json::array({n, c.real(), c.imag()}));
    return nlohmann::json{
        {"label", label_},
        {"cutoff",
         {{"type", cutoff_.kind() == TruncationPolicy::Kind::max_index ? "max_index" : "max_weight"},
          {"value", cutoff_.value()}}},
        {"coeffs", coeffs}};
}

CoefficientSeries CoefficientSeries::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("cutoff") || !j.contains("coeffs"))
        throw std::invalid_argument("series JSON must carry cutoff and coeffs");
    const auto& cj = j.at("cutoff");
    std::string type = cj.at("type").get<std::string>();
    if (cj.at("value").is_number_integer() && cj.at("value").get<long long>() < 0)
        throw std::invalid_argument("cutoff value must be nonnegative");
    std::uint64_t value = cj.at("value").get<std::uint64_t>();
    TruncationPolicy cutoff = type == "max_index"   ? TruncationPolicy::max_index(value)
                              : type == "max_weight" ? TruncationPolicy::max_weight(value)
                                                     : throw std::invalid_argument(
                                                           "unknown cutoff type: " + type);
    CoeffMap coeffs;
    std::uint64_t last = 0;
    for (const auto& row : j.at("coeffs")) {
        if (!row.is_array() || row.size() != 3)
            throw std::invalid_argument("series coeff rows must be [n, re, im]");
        if (row[0].is_number_integer() && row[0].get<long long>() <= 0)
            throw std::domain_error("index must be a positive integer");
        std::uint64_t n = row[0].get<std::uint64_t>();
        if (n <= last)
            throw std::invalid_argument("series coeff keys must be strictly increasing");
        last = n;
        coeffs.emplace(n, Complex{row[1].get<double>(), row[2].get<double>()});
    }
    std::string label = j.value("label", std::string{});
    return CoefficientSeries(std::move(coeffs), cutoff, std::move(label));
}

CoefficientSeries DilatedSeries::as_series() const {
    return CoefficientSeries(coeffs_, base_.cutoff(), base_.label());
}

DilatedSeries dilate(const CoefficientSeries& f, double r) {
    if (!(r > 0.0) || r > 1.0)
        throw std::domain_error("dilation radius must lie in (0, 1]");
    CoeffMap out;
    for (const auto& [n, a] : f.coefficients()) {
        Complex c = a * pow_int(r, weight_of(n));
        if (c != Complex{}) out.emplace(n, c);
    }
    return DilatedSeries(f, r, std::move(out));
}

double dilation_compose_error(const CoefficientSeries& f, double r, double r2) {
    CoefficientSeries twice = dilate(dilate(f, r).as_series(), r2).as_series();
    CoefficientSeries once = dilate(f, r * r2).as_series();
    double worst = 0.0;
    for (const auto& [n, c] : once.coefficients()) {
        auto it = twice.coefficients().find(n);
        Complex other = it == twice.coefficients().end() ? Complex{} : it->second;
        double denom = std::abs(c);
        if (denom == 0.0) continue;
        worst = std::max(worst, std::abs(other - c) / denom);
    }
    return worst;
}

namespace {
double norm2_of(const CoeffMap& coeffs) {
    KahanSum acc;
    for (const auto& [n, c] : coeffs) {
        (void)n;
        acc.add(std::norm(c));
    }
    return std::sqrt(acc.value());
}
} // namespace

double norm2_exact(const CoefficientSeries& f) { return norm2_of(f.coefficients()); }
double norm2_exact(const DilatedSeries& f) { return norm2_of(f.coefficients()); }

CoefficientSeries partial_sum(const CoefficientSeries& f, std::uint64_t m) {
    if (m == 0) throw std::domain_error("partial sum bound must be positive");
    CoeffMap out;
    for (const auto& [n, c] : f.coefficients()) {
        if (n > m) break;
        out.emplace(n, c);
    }
    return CoefficientSeries(std::move(out), f.cutoff(), f.label());
}

Complex Multiplier::at(std::uint64_t n) const {
    auto it = values_.find(n);
    if (it != values_.end()) return it->second;
    if (default_) return *default_;
    throw std::invalid_argument("multiplier has no value at n=" + std::to_string(n));
}

double Multiplier::sup_abs_over(const CoefficientSeries& f) const {
    double sup = 0.0;
    for (const auto& [n, c] : f.coefficients()) {
        (void)c;
        sup = std::max(sup, std::abs(at(n)));
    }
    return sup;
}

CoefficientSeries multiplier_apply(const Multiplier& lambda, const CoefficientSeries& f) {
    CoeffMap out;
    for (const auto& [n, c] : f.coefficients()) {
        Complex v = lambda.at(n) * c;
        if (v != Complex{}) out.emplace(n, v);
    }
    return CoefficientSeries(std::move(out), f.cutoff(), f.label());
}

} // namespace polytorus
