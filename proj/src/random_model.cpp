#include "polytorus/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polytorus/kahan.hpp"

namespace polytorus {

namespace {
constexpr std::size_t kFactorCap = 2000; // dense covariance cap, desk scale
constexpr double kSymTol = 1e-10;
constexpr double kPsdTol = 1e-10;
} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::bernoulli: return "bernoulli";
        case ModelKind::steinhaus: return "steinhaus";
        case ModelKind::gaussian_iid: return "gaussian_iid";
        case ModelKind::gaussian_process: return "gaussian_process";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "bernoulli") return ModelKind::bernoulli;
    if (s == "steinhaus") return ModelKind::steinhaus;
    if (s == "gaussian_iid") return ModelKind::gaussian_iid;
    if (s == "gaussian_process") return ModelKind::gaussian_process;
    throw std::invalid_argument("unknown model kind: " + s);
}

CovarianceFactor covariance_factor(const Eigen::MatrixXd& K) {
    if (K.rows() != K.cols()) throw std::invalid_argument("covariance matrix must be square");
    if (static_cast<std::size_t>(K.rows()) > kFactorCap)
        throw std::invalid_argument("covariance dimension exceeds factorization cap (2000)");
    const auto n = K.rows();
    if (n == 0) return {Eigen::MatrixXd(0, 0), false};

    double scale = K.cwiseAbs().maxCoeff();
    if (scale == 0.0) return {Eigen::MatrixXd::Zero(n, n), false};
    double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymTol * scale)
        throw std::invalid_argument("covariance matrix is not symmetric within tolerance");

    Eigen::MatrixXd Ks = 0.5 * (K + K.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Ks);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd L = llt.matrixL();
        if (((L * L.transpose() - Ks).cwiseAbs().maxCoeff()) <= 1e-8 * scale) return {L, false};
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ks);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition of covariance failed");
    Eigen::VectorXd lam = es.eigenvalues();
    if (lam.minCoeff() < -kPsdTol * scale)
        throw std::domain_error("covariance matrix is not positive semidefinite");
    bool clipped = false;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < 0.0) {
            lam[i] = 0.0;
            clipped = true;
        }
    }
    Eigen::MatrixXd L = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    return {L, clipped};
}

RandomModel RandomModel::bernoulli() { return RandomModel(ModelKind::bernoulli); }
RandomModel RandomModel::steinhaus() { return RandomModel(ModelKind::steinhaus); }
RandomModel RandomModel::gaussian_iid() { return RandomModel(ModelKind::gaussian_iid); }

RandomModel RandomModel::gaussian_process(std::vector<double> mean, Eigen::MatrixXd covariance) {
    if (static_cast<Eigen::Index>(mean.size()) != covariance.rows())
        throw std::invalid_argument("mean vector and covariance dimension mismatch");
    RandomModel m(ModelKind::gaussian_process);
    auto fac = covariance_factor(covariance);
    m.mean_ = std::move(mean);
    m.cov_ = std::move(covariance);
    m.factor_ = std::move(fac.L);
    m.clipped_ = fac.clipped;
    return m;
}

RandomModel RandomModel::gaussian_process_diag(std::vector<double> mean,
                                               std::vector<double> variances) {
    if (mean.size() != variances.size())
        throw std::invalid_argument("mean vector and variance vector length mismatch");
    for (double v : variances)
        if (v < 0.0) throw std::domain_error("covariance matrix is not positive semidefinite");
    RandomModel m(ModelKind::gaussian_process);
    auto n = static_cast<Eigen::Index>(variances.size());
    m.cov_ = Eigen::MatrixXd::Zero(n, n);
    m.factor_ = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.cov_(i, i) = variances[static_cast<std::size_t>(i)];
        m.factor_(i, i) = std::sqrt(variances[static_cast<std::size_t>(i)]);
    }
    m.mean_ = std::move(mean);
    m.diag_input_ = true;
    return m;
}

std::optional<std::size_t> RandomModel::dimension() const {
    if (kind_ == ModelKind::gaussian_process) return mean_.size();
    return std::nullopt;
}

bool RandomModel::centered() const {
    if (kind_ != ModelKind::gaussian_process) return true;
    return std::all_of(mean_.begin(), mean_.end(), [](double m) { return m == 0.0; });
}

RandomModel RandomModel::centered_copy() const {
    if (kind_ != ModelKind::gaussian_process) return *this;
    RandomModel m(ModelKind::gaussian_process);
    m.mean_.assign(mean_.size(), 0.0);
    m.cov_ = cov_;
    m.factor_ = factor_;
    m.clipped_ = clipped_;
    m.diag_input_ = diag_input_;
    return m;
}

std::string RandomModel::stream_label() const {
    switch (kind_) {
        case ModelKind::bernoulli: return "bernoulli";
        case ModelKind::steinhaus: return "steinhaus";
        default: return "gaussian";
    }
}

nlohmann::json RandomModel::to_json() const {
    nlohmann::json j{{"kind", to_string(kind_)}};
    if (kind_ == ModelKind::gaussian_process) {
        j["mean"] = mean_;
        if (diag_input_) {
            std::vector<double> diag(static_cast<std::size_t>(cov_.rows()));
            for (Eigen::Index i = 0; i < cov_.rows(); ++i)
                diag[static_cast<std::size_t>(i)] = cov_(i, i);
            j["covariance"] = nlohmann::json{{"diag", diag}};
        } else {
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index i = 0; i < cov_.rows(); ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index k = 0; k < cov_.cols(); ++k) row.push_back(cov_(i, k));
                rows.push_back(row);
            }
            j["covariance"] = rows;
        }
    }
    return j;
}

RandomModel RandomModel::from_json(const nlohmann::json& j) {
    ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (kind != ModelKind::gaussian_process) {
        switch (kind) {
            case ModelKind::bernoulli: return bernoulli();
            case ModelKind::steinhaus: return steinhaus();
            default: return gaussian_iid();
        }
    }
    const auto& cj = j.at("covariance");
    std::vector<double> mean;
    if (j.contains("mean")) mean = j.at("mean").get<std::vector<double>>();
    if (cj.is_object() && cj.contains("diag")) {
        auto diag = cj.at("diag").get<std::vector<double>>();
        if (mean.empty()) mean.assign(diag.size(), 0.0);
        return gaussian_process_diag(std::move(mean), std::move(diag));
    }
    auto rows = cj.get<std::vector<std::vector<double>>>();
    auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw std::invalid_argument("covariance matrix must be square");
        for (Eigen::Index k = 0; k < n; ++k)
            K(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    if (mean.empty()) mean.assign(static_cast<std::size_t>(n), 0.0);
    return gaussian_process(std::move(mean), std::move(K));
}

namespace {

Complex iid_value(ModelKind kind, const RngStream& stream, std::uint64_t n) {
    RngStream sub = stream.substream(n);
    switch (kind) {
        case ModelKind::bernoulli: return {(sub.next_u64() & 1ULL) ? 1.0 : -1.0, 0.0};
        case ModelKind::steinhaus: return sub.next_circle();
        default: return {sub.next_gaussian(), 0.0};
    }
}

} // namespace

Realization::Realization(ModelKind kind, std::vector<std::uint64_t> indices,
                         std::vector<Complex> values)
    : kind_(kind), indices_(std::move(indices)), values_(std::move(values)) {
    if (!indices_.empty() && indices_.size() != values_.size())
        throw std::invalid_argument("realization indices/values length mismatch");
    for (std::size_t i = 1; i < indices_.size(); ++i)
        if (indices_[i] <= indices_[i - 1])
            throw std::invalid_argument("realization indices must be strictly increasing");
    if (!indices_.empty() && indices_.front() == 0)
        throw std::domain_error("realization indices must be positive");
}

Realization Realization::draw(const RandomModel& model, std::uint64_t N,
                              const RngStream& stream) {
    Realization x;
    x.kind_ = model.kind();
    if (model.kind() == ModelKind::gaussian_process) {
        std::size_t dim = model.mean().size();
        if (N > dim)
            throw std::invalid_argument("draw length exceeds Gaussian process dimension");
        Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            RngStream sub = stream.substream(i + 1);
            z[static_cast<Eigen::Index>(i)] = sub.next_gaussian();
        }
        Eigen::VectorXd v = model.factor() * z;
        x.values_.reserve(N);
        for (std::uint64_t i = 0; i < N; ++i)
            x.values_.emplace_back(model.mean()[i] + v[static_cast<Eigen::Index>(i)], 0.0);
        return x;
    }
    x.values_.reserve(N);
    for (std::uint64_t n = 1; n <= N; ++n) x.values_.push_back(iid_value(model.kind(), stream, n));
    return x;
}

Realization Realization::draw_at(const RandomModel& model, std::vector<std::uint64_t> indices,
                                 const RngStream& stream) {
    if (model.kind() == ModelKind::gaussian_process)
        throw std::invalid_argument("sparse draws are only defined for the iid models");
    Realization x;
    x.kind_ = model.kind();
    x.values_.reserve(indices.size());
    for (std::size_t i = 1; i < indices.size(); ++i)
        if (indices[i] <= indices[i - 1])
            throw std::invalid_argument("realization indices must be strictly increasing");
    for (std::uint64_t n : indices) {
        if (n == 0) throw std::domain_error("realization indices must be positive");
        x.values_.push_back(iid_value(model.kind(), stream, n));
    }
    x.indices_ = std::move(indices);
    return x;
}

bool Realization::covers(std::uint64_t n) const {
    if (n == 0) return false;
    if (indices_.empty()) return n <= values_.size();
    return std::binary_search(indices_.begin(), indices_.end(), n);
}

Complex Realization::value(std::uint64_t n) const {
    if (indices_.empty()) {
        if (n == 0 || n > values_.size())
            throw std::invalid_argument("realization does not cover n=" + std::to_string(n));
        return values_[n - 1];
    }
    auto it = std::lower_bound(indices_.begin(), indices_.end(), n);
    if (it == indices_.end() || *it != n)
        throw std::invalid_argument("realization does not cover n=" + std::to_string(n));
    return values_[static_cast<std::size_t>(it - indices_.begin())];
}

CoefficientSeries randomize(const CoefficientSeries& f, const Realization& x) {
    CoeffMap out;
    for (const auto& [n, a] : f.coefficients()) {
        Complex v = a * x.value(n); // throws when not covered
        if (v != Complex{}) out.emplace(n, v);
    }
    return CoefficientSeries(std::move(out), f.cutoff(), f.label());
}

nlohmann::json MomentEstimate::to_json() const {
    return nlohmann::json{{"p", p},
                          {"r", r},
                          {"mean", mean},
                          {"stderr", stderr_},
                          {"mean_inner_stderr", mean_inner_stderr},
                          {"outer", outer},
                          {"inner", inner},
                          {"seed", {{"master", seed.master}, {"stream", seed.stream}}},
                          {"label", label}};
}

namespace {

struct NestedMcResult {
    RunningStat outer_stat;
    KahanSum inner_stderr_sum;
};

/// Outer loop over model draws, inner Haar-sample mean per draw. The model
/// stream indexes draws, the torus stream indexes (draw, sample).
template <typename CoeffFn>
NestedMcResult nested_mc(const detail::CompiledSeries& cs, CoeffFn&& dilated_coeffs, double p,
                         std::uint64_t outer, std::uint64_t inner, const RngStream& model_stream,
                         const RngStream& torus_stream) {
    NestedMcResult res;
    std::vector<Complex> pows, mono, ck;
    for (std::uint64_t d = 1; d <= outer; ++d) {
        dilated_coeffs(d, model_stream.substream(d), ck);
        RunningStat inner_stat;
        RngStream draw_torus = torus_stream.substream(d);
        for (std::uint64_t s = 1; s <= inner; ++s) {
            RngStream ss = draw_torus.substream(s);
            TorusPoint w;
            w.coords.reserve(cs.dim);
            for (std::size_t j = 0; j < cs.dim; ++j) w.coords.push_back(ss.next_circle());
            cs.power_table(w, pows);
            cs.monomials(pows, mono);
            KahanComplexSum acc;
            for (std::size_t i = 0; i < ck.size(); ++i) acc.add(ck[i] * mono[i]);
            inner_stat.add(detail::pow_abs(acc.value(), p));
        }
        res.outer_stat.add(inner_stat.mean());
        res.inner_stderr_sum.add(inner_stat.stderr_of_mean());
    }
    return res;
}

void validate_nested_params(double p, double r, std::uint64_t outer, std::uint64_t inner) {
    if (p < 1.0) throw std::domain_error("p must be >= 1");
    if (!(r > 0.0) || r > 1.0) throw std::domain_error("dilation radius must lie in (0, 1]");
    if (outer < 2 || inner < 2)
        throw std::domain_error("nested Monte Carlo needs at least two draws and two samples");
}

} // namespace

MomentEstimate randomized_moment(const CoefficientSeries& f, const RandomModel& model, double p,
                                 double r, std::uint64_t outer, std::uint64_t inner,
                                 std::uint64_t seed) {
    validate_nested_params(p, r, outer, inner);
    std::uint64_t maxkey = f.max_key();
    if (auto dim = model.dimension(); dim && maxkey > *dim)
        throw std::invalid_argument("Gaussian process dimension does not cover the series");

    auto cs = detail::CompiledSeries::build(f.coefficients());
    std::vector<double> rw(cs.terms.size());
    for (std::size_t i = 0; i < cs.terms.size(); ++i) rw[i] = pow_int(r, cs.terms[i].weight);

    RngStream model_stream = RngStream::from_seed(seed, model.stream_label());
    RngStream torus_stream = RngStream::from_seed(seed, "torus");

    auto coeff_fn = [&](std::uint64_t, const RngStream& draw_stream, std::vector<Complex>& ck) {
        Realization x = Realization::draw(model, maxkey, draw_stream);
        ck.resize(cs.terms.size());
        for (std::size_t i = 0; i < cs.terms.size(); ++i)
            ck[i] = cs.terms[i].a * x.value(cs.terms[i].n) * rw[i];
    };
    auto res = nested_mc(cs, coeff_fn, p, outer, inner, model_stream, torus_stream);

    MomentEstimate est;
    est.p = p;
    est.r = r;
    est.mean = res.outer_stat.mean();
    est.stderr_ = res.outer_stat.stderr_of_mean();
    est.mean_inner_stderr = res.inner_stderr_sum.value() / static_cast<double>(outer);
    est.outer = outer;
    est.inner = inner;
    est.seed = {seed, model.stream_label()};
    est.label = f.label();
    return est;
}

nlohmann::json OperatorNormReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows)
        rows_json.push_back({{"label", row.label},
                             {"norm2", row.norm2},
                             {"lifted_mean", row.lifted_mean},
                             {"lifted_stderr", row.lifted_stderr},
                             {"ratio", row.ratio},
                             {"ratio_stderr", row.ratio_stderr}});
    return nlohmann::json{{"rows", rows_json},
                          {"max_ratio", max_ratio},
                          {"noncentered_warning", noncentered_warning},
                          {"p", p},
                          {"r", r},
                          {"outer", outer},
                          {"inner", inner},
                          {"seed", {{"master", seed.master}, {"stream", seed.stream}}}};
}

OperatorNormReport operator_norm_estimate(const RandomModel& model, double p,
                                          const std::vector<CoefficientSeries>& probes, double r,
                                          std::uint64_t outer, std::uint64_t inner,
                                          std::uint64_t seed) {
    validate_nested_params(p, r, outer, inner);
    if (probes.empty()) throw std::invalid_argument("probe list must be nonempty");

    std::uint64_t maxkey = 1;
    for (const auto& f : probes) {
        if (norm2_exact(f) == 0.0) throw std::invalid_argument("probe series has zero norm");
        maxkey = std::max(maxkey, f.max_key());
    }
    if (auto dim = model.dimension(); dim && maxkey > *dim)
        throw std::invalid_argument("Gaussian process dimension does not cover the probes");

    OperatorNormReport rep;
    rep.p = p;
    rep.r = r;
    rep.outer = outer;
    rep.inner = inner;
    rep.seed = {seed, model.stream_label()};
    rep.noncentered_warning = !model.centered();

    RngStream model_stream = RngStream::from_seed(seed, model.stream_label());
    RngStream torus_stream = RngStream::from_seed(seed, "torus");

    // Shared draws: realization d is the same for every probe.
    std::vector<Realization> draws;
    draws.reserve(outer);
    for (std::uint64_t d = 1; d <= outer; ++d)
        draws.push_back(Realization::draw(model, maxkey, model_stream.substream(d)));

    for (const auto& f : probes) {
        auto cs = detail::CompiledSeries::build(f.coefficients());
        std::vector<double> rw(cs.terms.size());
        for (std::size_t i = 0; i < cs.terms.size(); ++i) rw[i] = pow_int(r, cs.terms[i].weight);

        RunningStat lifted;
        std::vector<Complex> pows, mono, ck(cs.terms.size());
        for (std::uint64_t d = 1; d <= outer; ++d) {
            for (std::size_t i = 0; i < cs.terms.size(); ++i)
                ck[i] = cs.terms[i].a * draws[d - 1].value(cs.terms[i].n) * rw[i];
            RunningStat inner_stat;
            RngStream draw_torus = torus_stream.substream(d);
            for (std::uint64_t s = 1; s <= inner; ++s) {
                RngStream ss = draw_torus.substream(s);
                TorusPoint w;
                w.coords.reserve(cs.dim);
                for (std::size_t j = 0; j < cs.dim; ++j) w.coords.push_back(ss.next_circle());
                cs.power_table(w, pows);
                cs.monomials(pows, mono);
                KahanComplexSum acc;
                for (std::size_t i = 0; i < ck.size(); ++i) acc.add(ck[i] * mono[i]);
                inner_stat.add(detail::pow_abs(acc.value(), p));
            }
            lifted.add(std::pow(inner_stat.mean(), 2.0 / p));
        }

        OperatorNormRow row;
        row.label = f.label();
        row.norm2 = norm2_exact(f);
        row.lifted_mean = lifted.mean();
        row.lifted_stderr = lifted.stderr_of_mean();
        row.ratio = row.lifted_mean > 0.0 ? std::sqrt(row.lifted_mean) / row.norm2 : 0.0;
        row.ratio_stderr = row.lifted_mean > 0.0
                               ? row.lifted_stderr / (2.0 * std::sqrt(row.lifted_mean)) / row.norm2
                               : 0.0;
        rep.rows.push_back(row);
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    }
    return rep;
}

nlohmann::json RootLimitReport::to_json() const {
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : per_weight)
        bands.push_back({{"weight", b.weight},
                         {"min", b.min_value},
                         {"max", b.max_value},
                         {"max_deviation", b.max_deviation},
                         {"count", b.count}});
    return nlohmann::json{{"min", min_value},
                          {"max", max_value},
                          {"max_deviation", max_deviation},
                          {"count", count},
                          {"per_weight", bands}};
}

RootLimitReport root_limit_stats(const std::vector<std::pair<std::uint64_t, double>>& abs_by_n) {
    RootLimitReport rep;
    std::map<std::uint64_t, RootLimitBandStat> bands;
    for (const auto& [n, absx] : abs_by_n) {
        if (n < 2)
            throw std::invalid_argument("root limit window must exclude n=1 (weight 0)");
        if (absx < 0.0) throw std::domain_error("absolute values must be nonnegative");
        std::uint64_t w = weight_of(n);
        double v = std::pow(absx, 1.0 / static_cast<double>(w));
        double dev = std::abs(v - 1.0);
        if (rep.count == 0) {
            rep.min_value = rep.max_value = v;
        } else {
            rep.min_value = std::min(rep.min_value, v);
            rep.max_value = std::max(rep.max_value, v);
        }
        rep.max_deviation = std::max(rep.max_deviation, dev);
        ++rep.count;
        auto& band = bands[w];
        if (band.count == 0) {
            band.weight = w;
            band.min_value = band.max_value = v;
        } else {
            band.min_value = std::min(band.min_value, v);
            band.max_value = std::max(band.max_value, v);
        }
        band.max_deviation = std::max(band.max_deviation, dev);
        ++band.count;
    }
    rep.per_weight.reserve(bands.size());
    for (auto& [w, b] : bands) {
        (void)w;
        rep.per_weight.push_back(b);
    }
    return rep;
}

RootLimitReport root_limit_diagnostic(const Realization& x, std::uint64_t lo, std::uint64_t hi) {
    if (lo < 2) throw std::invalid_argument("root limit window must exclude n=1 (weight 0)");
    if (hi < lo) throw std::invalid_argument("empty root limit window");
    std::vector<std::pair<std::uint64_t, double>> entries;
    entries.reserve(hi - lo + 1);
    for (std::uint64_t n = lo; n <= hi; ++n) entries.emplace_back(n, std::abs(x.value(n)));
    return root_limit_stats(entries);
}

GaussianTailBound gaussian_tail_bound(double x) {
    if (x < 0.0) throw std::domain_error("tail bound argument must be nonnegative");
    GaussianTailBound b;
    double c = std::sqrt(2.0 / RngStream::pi());
    b.small_ball = c * x;
    if (x >= 1.0) b.upper_tail = c * std::exp(-0.5 * x * x);
    return b;
}

} // namespace polytorus
