// polytorus command line tool: series/Dirichlet utilities plus the batch
// experiment runners. Exit codes: 0 success, 1 validation error, 2 a FAIL
// verdict from an experiment-level check.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polytorus/convergence.hpp"
#include "polytorus/experiments.hpp"
#include "polytorus/kahan.hpp"
#include "polytorus/version.hpp"

using nlohmann::json;
using namespace polytorus;

namespace {

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> outer;
    std::optional<std::uint64_t> inner;
    std::string truncation;
    bool gnuplot = false;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out_path.empty()) {
        std::cout << text << std::endl;
        return;
    }
    std::ofstream out(g.out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + g.out_path);
    out << text << std::endl;
}

ExperimentConfig build_config(const GlobalOpts& g, const std::string& experiment) {
    ExperimentConfig cfg;
    if (!g.config_path.empty()) cfg = ExperimentConfig::from_json(load_json_file(g.config_path));
    cfg.experiment = experiment;
    if (g.seed) cfg.seed = *g.seed;
    if (g.samples) cfg.samples = *g.samples;
    if (g.outer) cfg.outer = *g.outer;
    if (g.inner) cfg.inner = *g.inner;
    if (!g.truncation.empty()) cfg.truncation = TruncationPolicy::parse(g.truncation);
    return cfg;
}

CoefficientSeries series_from(const GlobalOpts& g, const ExperimentConfig& cfg,
                              const std::string& family) {
    if (cfg.series) return *cfg.series;
    std::string fam = !family.empty() ? family : cfg.family.value_or("");
    if (fam.empty())
        throw std::invalid_argument("no series given: pass --family or a config with \"series\"");
    TruncationPolicy cutoff = cfg.truncation;
    if (!g.truncation.empty()) cutoff = TruncationPolicy::parse(g.truncation);
    return make_family(fam, cutoff);
}

std::string estimates_csv(const std::vector<NormEstimate>& ests) {
    std::ostringstream os;
    os << NormEstimate::csv_header();
    for (const auto& e : ests) os << '\n' << e.csv_row();
    return os.str();
}

std::string estimates_gnuplot(const std::vector<NormEstimate>& ests) {
    std::ostringstream os;
    os.precision(17);
    os << "# r mean stderr";
    for (const auto& e : ests) os << '\n' << e.r << ' ' << e.mean << ' ' << e.stderr_;
    return os.str();
}

std::string report_csv(const ExperimentReport& rep) {
    // tables only: flatten leaf arrays of the payload into key,value rows
    std::ostringstream os;
    os << "key,value";
    std::function<void(const json&, const std::string&)> walk = [&](const json& node,
                                                                    const std::string& prefix) {
        if (node.is_object()) {
            for (auto it = node.begin(); it != node.end(); ++it)
                walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
        } else if (node.is_array()) {
            std::size_t i = 0;
            for (const auto& el : node) walk(el, prefix + "[" + std::to_string(i++) + "]");
        } else {
            os << '\n' << prefix << ',' << node.dump();
        }
    };
    walk(rep.payload, "");
    return os.str();
}

int run_experiment(const GlobalOpts& g, const std::string& name,
                   ExperimentReport (*runner)(const ExperimentConfig&),
                   const std::string& family) {
    ExperimentConfig cfg = build_config(g, name);
    if (!family.empty()) cfg.family = family;
    ExperimentReport rep = runner(cfg);
    if (g.format == "csv")
        emit(g, report_csv(rep));
    else
        emit(g, rep.full_json().dump(2));
    return rep.pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polytorus: monomial series, torus norms, randomized series and "
                 "Dirichlet-side experiments"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed (required for stochastic commands)");
    app.add_option("--config", g.config_path, "experiment config JSON file");
    app.add_option("--out", g.out_path, "output path (stdout when omitted)");
    app.add_option("--format", g.format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--samples", g.samples, "torus samples per estimate");
    app.add_option("--outer", g.outer, "outer draws for nested Monte Carlo");
    app.add_option("--inner", g.inner, "inner torus samples for nested Monte Carlo");
    app.add_option("--truncation", g.truncation, "series cutoff: max_index:N or max_weight:W");
    app.add_flag("--gnuplot", g.gnuplot, "emit gnuplot-style profile data");

    // lift
    auto* lift = app.add_subcommand("lift", "Bohr lift of a Dirichlet polynomial (and inverse)");
    std::string lift_in;
    bool lift_inverse = false;
    lift->add_option("--in", lift_in, "input JSON file")->required();
    lift->add_flag("--inverse", lift_inverse, "map a series back to a Dirichlet polynomial");

    // norm
    auto* norm = app.add_subcommand("norm", "Monte Carlo estimate of ||F_[r]||_p^p");
    std::string norm_family;
    double norm_p = 2.0, norm_r = 0.5;
    norm->add_option("--family", norm_family, "built-in coefficient family");
    norm->add_option("--p", norm_p, "exponent p >= 1");
    norm->add_option("--r", norm_r, "dilation radius in (0,1]");

    // profile
    auto* profile = app.add_subcommand("profile", "norm estimates along an r ladder");
    std::string profile_family, profile_ladder;
    double profile_p = 2.0;
    profile->add_option("--family", profile_family, "built-in coefficient family");
    profile->add_option("--p", profile_p, "exponent p >= 1");
    profile->add_option("--ladder", profile_ladder, "comma separated increasing r values");

    // randomize
    auto* rand_cmd = app.add_subcommand("randomize", "draw a realization and apply it to a series");
    std::string rand_family, rand_model = "bernoulli";
    rand_cmd->add_option("--family", rand_family, "built-in coefficient family");
    rand_cmd->add_option("--model", rand_model,
                         "bernoulli|steinhaus|gaussian_iid (gaussian_process via --config)");

    // experiments
    auto* dich = app.add_subcommand("dichotomy", "boundedness dichotomy experiment");
    std::string dich_family;
    dich->add_option("--family", dich_family, "coefficient family under test");
    auto* khin = app.add_subcommand("khintchine", "moment-equivalence ratio experiment");
    auto* mean = app.add_subcommand("mean-shift", "mean/centered decomposition experiment");
    auto* bohr = app.add_subcommand("bohr", "Bohr correspondence experiment");

    // root-test
    auto* root = app.add_subcommand("root-test", "weighted root test over an index window");
    double root_beta = 0.0;
    std::string root_window;
    root->add_option("--beta", root_beta, "synthetic x_n = beta^{weight(n)}");
    root->add_option("--window", root_window, "index window lo:hi");

    // identity
    auto* ident = app.add_subcommand("identity", "weight-graded sum vs product identity");
    double ident_beta = 0.5;
    std::uint64_t ident_w = 40;
    ident->add_option("--beta", ident_beta, "base in (0,1)");
    ident->add_option("--max-weight,-W", ident_w, "weight cutoff");

    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (lift->parsed()) {
            json j = load_json_file(lift_in);
            if (lift_inverse) {
                DirichletPolynomial q = bohr_inverse(CoefficientSeries::from_json(j));
                emit(g, q.to_json().dump(2));
            } else {
                CoefficientSeries f = bohr_lift(DirichletPolynomial::from_json(j));
                emit(g, f.to_json().dump(2));
            }
            return 0;
        }

        if (norm->parsed()) {
            ExperimentConfig cfg = build_config(g, "norm");
            if (!cfg.seed) throw std::invalid_argument("--seed is required for norm");
            CoefficientSeries f = series_from(g, cfg, norm_family);
            NormEstimate est = mc_norm(f, norm_p, norm_r, cfg.samples, *cfg.seed);
            emit(g, g.format == "csv" ? estimates_csv({est}) : est.to_json().dump(2));
            return 0;
        }

        if (profile->parsed()) {
            ExperimentConfig cfg = build_config(g, "profile");
            if (!cfg.seed) throw std::invalid_argument("--seed is required for profile");
            CoefficientSeries f = series_from(g, cfg, profile_family);
            std::vector<double> ladder = cfg.ladder;
            if (!profile_ladder.empty()) {
                ladder.clear();
                std::stringstream ss(profile_ladder);
                std::string tok;
                while (std::getline(ss, tok, ',')) ladder.push_back(std::stod(tok));
            }
            auto ests = norm_profile(f, profile_p, ladder, cfg.samples, *cfg.seed);
            if (g.gnuplot)
                emit(g, estimates_gnuplot(ests));
            else if (g.format == "csv")
                emit(g, estimates_csv(ests));
            else {
                json arr = json::array();
                for (const auto& e : ests) arr.push_back(e.to_json());
                emit(g, arr.dump(2));
            }
            return 0;
        }

        if (rand_cmd->parsed()) {
            ExperimentConfig cfg = build_config(g, "randomize");
            if (!cfg.seed) throw std::invalid_argument("--seed is required for randomize");
            CoefficientSeries f = series_from(g, cfg, rand_family);
            RandomModel model = g.config_path.empty()
                                    ? RandomModel::from_json({{"kind", rand_model}})
                                    : cfg.model;
            RngStream stream = RngStream::from_seed(*cfg.seed, model.stream_label());
            Realization x = Realization::draw(model, f.max_key(), stream);
            CoefficientSeries out = randomize(f, x);
            json j = out.to_json();
            j["seed"] = {{"master", *cfg.seed}, {"stream", model.stream_label()}};
            j["model"] = model.to_json();
            emit(g, j.dump(2));
            return 0;
        }

        if (root->parsed()) {
            json report;
            if (!root_beta) {
                if (g.config_path.empty())
                    throw std::invalid_argument("root-test needs --beta or a config with values");
                json j = load_json_file(g.config_path);
                auto values = j.at("values").get<std::vector<double>>();
                std::uint64_t start = j.at("start").get<std::uint64_t>();
                report = root_test(values, start).to_json();
            } else {
                std::uint64_t lo = 2, hi = 2000;
                if (!root_window.empty()) {
                    auto colon = root_window.find(':');
                    if (colon == std::string::npos)
                        throw std::invalid_argument("window must look like lo:hi");
                    lo = std::stoull(root_window.substr(0, colon));
                    hi = std::stoull(root_window.substr(colon + 1));
                }
                if (hi < lo) throw std::invalid_argument("empty window");
                std::vector<double> x;
                x.reserve(hi - lo + 1);
                for (std::uint64_t n = lo; n <= hi; ++n)
                    x.push_back(pow_int(root_beta, weight_of(n)));
                report = root_test(x, lo).to_json();
            }
            emit(g, report.dump(2));
            return 0;
        }

        if (ident->parsed()) {
            WeightSumIdentity id = geometric_weight_sum(ident_beta, ident_w);
            emit(g, id.to_json().dump(2));
            return id.consistent() ? 0 : 2;
        }

        if (dich->parsed()) return run_experiment(g, "dichotomy", run_dichotomy, dich_family);
        if (khin->parsed()) return run_experiment(g, "khintchine", run_khintchine, "");
        if (mean->parsed()) return run_experiment(g, "mean_shift", run_mean_shift, "");
        if (bohr->parsed()) return run_experiment(g, "bohr", run_bohr, "");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
