#include "polytorus/torus_norm.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polytorus/kahan.hpp"

namespace polytorus {

TorusPoint sample_torus(std::size_t dim, RngStream& stream) {
    if (dim == 0) throw std::domain_error("torus dimension must be positive");
    TorusPoint w;
    w.coords.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) w.coords.push_back(stream.next_circle());
    return w;
}

namespace detail {

CompiledSeries CompiledSeries::build(const CoeffMap& coeffs) {
    CompiledSeries cs;
    cs.terms.reserve(coeffs.size());
    for (const auto& [n, c] : coeffs) {
        MonomialIndex m = factorize(n);
        Term t;
        t.a = c;
        t.n = n;
        t.weight = m.weight;
        t.factor_begin = static_cast<std::uint32_t>(cs.factors.size());
        for (std::size_t j = 0; j < m.alpha.size(); ++j) {
            if (m.alpha[j] == 0) continue;
            cs.factors.emplace_back(static_cast<std::uint32_t>(j), m.alpha[j]);
            if (cs.max_exp.size() <= j) cs.max_exp.resize(j + 1, 0);
            cs.max_exp[j] = std::max(cs.max_exp[j], m.alpha[j]);
        }
        t.factor_end = static_cast<std::uint32_t>(cs.factors.size());
        cs.terms.push_back(t);
    }
    cs.dim = cs.max_exp.size();
    cs.pow_offset.resize(cs.dim, 0);
    std::uint32_t off = 0;
    for (std::size_t j = 0; j < cs.dim; ++j) {
        cs.pow_offset[j] = off;
        off += cs.max_exp[j] + 1;
    }
    cs.pow_size = off;
    return cs;
}

void CompiledSeries::power_table(const TorusPoint& w, std::vector<Complex>& pows) const {
    pows.resize(pow_size);
    for (std::size_t j = 0; j < dim; ++j) {
        Complex* base = pows.data() + pow_offset[j];
        base[0] = Complex{1.0, 0.0};
        for (std::uint32_t e = 1; e <= max_exp[j]; ++e) base[e] = base[e - 1] * w.coords[j];
    }
}

void CompiledSeries::monomials(const std::vector<Complex>& pows, std::vector<Complex>& out) const {
    out.resize(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        Complex m{1.0, 0.0};
        for (std::uint32_t f = terms[i].factor_begin; f < terms[i].factor_end; ++f)
            m *= pows[pow_offset[factors[f].first] + factors[f].second];
        out[i] = m;
    }
}

double pow_abs(Complex z, double p) {
    double n2 = std::norm(z);
    if (p == 2.0) return n2;
    if (p == 1.0) return std::sqrt(n2);
    if (p == 4.0) return n2 * n2;
    return std::pow(n2, 0.5 * p);
}

} // namespace detail

nlohmann::json NormEstimate::to_json() const {
    return nlohmann::json{{"p", p},
                          {"r", r},
                          {"mean", mean},
                          {"stderr", stderr_},
                          {"samples", samples},
                          {"seed", {{"master", seed.master}, {"stream", seed.stream}}},
                          {"label", label}};
}

NormEstimate NormEstimate::from_json(const nlohmann::json& j) {
    NormEstimate e;
    e.p = j.at("p").get<double>();
    e.r = j.at("r").get<double>();
    e.mean = j.at("mean").get<double>();
    e.stderr_ = j.at("stderr").get<double>();
    e.samples = j.at("samples").get<std::uint64_t>();
    e.seed.master = j.at("seed").at("master").get<std::uint64_t>();
    e.seed.stream = j.at("seed").at("stream").get<std::string>();
    e.label = j.value("label", std::string{});
    return e;
}

std::string NormEstimate::csv_header() { return "label,p,r,mean,stderr,samples,seed"; }

std::string NormEstimate::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << label << ',' << p << ',' << r << ',' << mean << ',' << stderr_ << ',' << samples << ','
       << seed.master;
    return os.str();
}

Complex evaluate(const DilatedSeries& f, const TorusPoint& w) {
    auto cs = detail::CompiledSeries::build(f.coefficients());
    if (cs.dim > w.dim()) {
        for (const auto& t : cs.terms)
            if (factorize(t.n).alpha.size() > w.dim())
                throw std::invalid_argument("torus point has " + std::to_string(w.dim()) +
                                            " coordinates but key n=" + std::to_string(t.n) +
                                            " needs more");
    }
    std::vector<Complex> pows, mono;
    cs.power_table(w, pows);
    cs.monomials(pows, mono);
    KahanComplexSum acc;
    for (std::size_t i = 0; i < cs.terms.size(); ++i) acc.add(cs.terms[i].a * mono[i]);
    return acc.value();
}

namespace {

constexpr std::uint64_t kSampleBlock = 4096;

/// Shared core for mc_norm / norm_profile: one pass over the Haar samples,
/// all rungs evaluated on the same points. Per-sample substreams make the
/// result independent of the block partition; blocks are merged in fixed
/// order so it is also independent of the thread count.
std::vector<RunningStat> profile_stats(const detail::CompiledSeries& cs,
                                       const std::vector<std::vector<Complex>>& rung_coeffs,
                                       double p, std::uint64_t samples, RngStream torus_stream,
                                       unsigned threads) {
    std::size_t rungs = rung_coeffs.size();
    auto run_block = [&](std::uint64_t s_begin, std::uint64_t s_end) {
        std::vector<RunningStat> stats(rungs);
        std::vector<Complex> pows, mono;
        for (std::uint64_t s = s_begin; s < s_end; ++s) {
            RngStream ss = torus_stream.substream(s + 1);
            TorusPoint w;
            w.coords.reserve(cs.dim);
            for (std::size_t j = 0; j < cs.dim; ++j) w.coords.push_back(ss.next_circle());
            cs.power_table(w, pows);
            cs.monomials(pows, mono);
            for (std::size_t k = 0; k < rungs; ++k) {
                KahanComplexSum acc;
                const auto& ck = rung_coeffs[k];
                for (std::size_t i = 0; i < ck.size(); ++i) acc.add(ck[i] * mono[i]);
                stats[k].add(detail::pow_abs(acc.value(), p));
            }
        }
        return stats;
    };

    std::uint64_t nblocks = (samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<std::vector<RunningStat>> block_stats(nblocks);
    if (threads <= 1 || nblocks <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b)
            block_stats[b] =
                run_block(b * kSampleBlock, std::min(samples, (b + 1) * kSampleBlock));
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::uint64_t> next{0};
        unsigned nthreads = std::min<std::uint64_t>(threads, nblocks);
        for (unsigned t = 0; t < nthreads; ++t)
            futs.push_back(std::async(std::launch::async, [&]() {
                for (;;) {
                    std::uint64_t b = next.fetch_add(1);
                    if (b >= nblocks) return;
                    block_stats[b] =
                        run_block(b * kSampleBlock, std::min(samples, (b + 1) * kSampleBlock));
                }
            }));
        for (auto& f : futs) f.get();
    }
    std::vector<RunningStat> stats(rungs);
    for (std::uint64_t b = 0; b < nblocks; ++b)
        for (std::size_t k = 0; k < rungs; ++k) stats[k].merge(block_stats[b][k]);
    return stats;
}

} // namespace

std::vector<NormEstimate> norm_profile(const CoefficientSeries& f, double p,
                                       const std::vector<double>& ladder, std::uint64_t samples,
                                       std::uint64_t seed) {
    if (p < 1.0) throw std::domain_error("p must be >= 1");
    if (samples < 2) throw std::domain_error("at least two samples required");
    if (ladder.empty()) throw std::invalid_argument("r ladder must be nonempty");
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (!(ladder[k] > 0.0) || ladder[k] > 1.0)
            throw std::domain_error("dilation radius must lie in (0, 1]");
        if (k > 0 && !(ladder[k] > ladder[k - 1]))
            throw std::invalid_argument("r ladder must be strictly increasing");
    }

    auto cs = detail::CompiledSeries::build(f.coefficients());
    std::vector<std::vector<Complex>> rung_coeffs(ladder.size());
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        rung_coeffs[k].reserve(cs.terms.size());
        for (const auto& t : cs.terms)
            rung_coeffs[k].push_back(t.a * pow_int(ladder[k], t.weight));
    }

    RngStream torus = RngStream::from_seed(seed, "torus");
    auto stats = profile_stats(cs, rung_coeffs, p, samples, torus,
                               std::thread::hardware_concurrency());

    std::vector<NormEstimate> out(ladder.size());
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        out[k].p = p;
        out[k].r = ladder[k];
        out[k].mean = stats[k].mean();
        out[k].stderr_ = stats[k].stderr_of_mean();
        out[k].samples = samples;
        out[k].seed = {seed, "torus"};
        out[k].label = f.label();
    }
    return out;
}

NormEstimate mc_norm(const CoefficientSeries& f, double p, double r, std::uint64_t samples,
                     std::uint64_t seed) {
    return norm_profile(f, p, {r}, samples, seed).front();
}

bool profile_monotone_ok(const std::vector<NormEstimate>& profile) {
    for (std::size_t k = 1; k < profile.size(); ++k) {
        double combined = 3.0 * std::hypot(profile[k].stderr_, profile[k - 1].stderr_);
        if (profile[k].mean < profile[k - 1].mean - combined) return false;
    }
    return true;
}

nlohmann::json CoeffBoundReport::to_json() const {
    return nlohmann::json{{"max_dilated_coeff", max_dilated_coeff},
                          {"argmax_n", argmax_n},
                          {"norm_upper_confidence", norm_upper_confidence},
                          {"violation", violation}};
}

CoeffBoundReport coeff_bound_check(const CoefficientSeries& f, const NormEstimate& estimate) {
    if (estimate.label != f.label())
        throw std::invalid_argument("norm estimate label '" + estimate.label +
                                    "' does not match series label '" + f.label() + "'");
    CoeffBoundReport rep;
    for (const auto& [n, a] : f.coefficients()) {
        double c = std::abs(a) * pow_int(estimate.r, weight_of(n));
        if (c > rep.max_dilated_coeff) {
            rep.max_dilated_coeff = c;
            rep.argmax_n = n;
        }
    }
    double upper = estimate.mean + 3.0 * estimate.stderr_;
    rep.norm_upper_confidence = upper > 0.0 ? std::pow(upper, 1.0 / estimate.p) : 0.0;
    rep.violation = rep.max_dilated_coeff > rep.norm_upper_confidence;
    return rep;
}

} // namespace polytorus
