// Python bindings for the core operations. Structured experiment reports
// cross the boundary as JSON strings; the package wrapper parses them.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polytorus/convergence.hpp"
#include "polytorus/experiments.hpp"
#include "polytorus/kahan.hpp"
#include "polytorus/version.hpp"

namespace py = pybind11;
using namespace polytorus;

namespace {

TruncationPolicy parse_cutoff(const std::string& text) { return TruncationPolicy::parse(text); }

CoefficientSeries make_series(const std::map<std::uint64_t, Complex>& coeffs,
                              const std::string& cutoff, const std::string& label) {
    CoeffMap m(coeffs.begin(), coeffs.end());
    return CoefficientSeries(std::move(m), parse_cutoff(cutoff), label);
}

RandomModel model_from_json_str(const std::string& text) {
    return RandomModel::from_json(nlohmann::json::parse(text));
}

ExperimentConfig config_from_json_str(const std::string& text) {
    return ExperimentConfig::from_json(nlohmann::json::parse(text));
}

} // namespace

PYBIND11_MODULE(_polytorus, m) {
    m.doc() = "Monomial indexing, torus norm estimation, randomized series and the "
              "Dirichlet-series bridge";
    m.attr("__version__") = kVersion;

    // ---- monomial indexing ----
    py::class_<MonomialIndex>(m, "MonomialIndex")
        .def_readonly("n", &MonomialIndex::n)
        .def_readonly("alpha", &MonomialIndex::alpha)
        .def_readonly("weight", &MonomialIndex::weight)
        .def("__repr__", [](const MonomialIndex& mi) {
            return "MonomialIndex(n=" + std::to_string(mi.n) +
                   ", weight=" + std::to_string(mi.weight) + ")";
        });

    m.def("nth_prime", &nth_prime, py::arg("j"));
    m.def("factorize", &factorize, py::arg("n"));
    m.def(
        "index_of",
        [](const std::vector<long long>& alpha) {
            std::vector<std::uint32_t> a;
            a.reserve(alpha.size());
            for (long long e : alpha) {
                if (e < 0) throw std::domain_error("exponents must be nonnegative");
                a.push_back(static_cast<std::uint32_t>(e));
            }
            return index_of(a);
        },
        py::arg("alpha"));
    m.def("weight_of", &weight_of, py::arg("n"));
    m.def("in_abschnitt", &in_abschnitt, py::arg("n"), py::arg("k"));
    m.def(
        "enumerate_indices",
        [](const std::string& cutoff) { return enumerate_indices(parse_cutoff(cutoff)); },
        py::arg("cutoff"), "cutoff is 'max_index:N' or 'max_weight:W'");

    // ---- series ----
    py::class_<CoefficientSeries>(m, "CoefficientSeries")
        .def(py::init(&make_series), py::arg("coeffs"), py::arg("cutoff"),
             py::arg("label") = std::string{})
        .def_property_readonly("label", &CoefficientSeries::label)
        .def_property_readonly("coefficients",
                               [](const CoefficientSeries& f) {
                                   std::map<std::uint64_t, Complex> out(
                                       f.coefficients().begin(), f.coefficients().end());
                                   return out;
                               })
        .def("term_count", &CoefficientSeries::term_count)
        .def("max_key", &CoefficientSeries::max_key)
        .def("torus_dim", &CoefficientSeries::torus_dim)
        .def("to_json", [](const CoefficientSeries& f) { return f.to_json().dump(); })
        .def_static("from_json", [](const std::string& text) {
            return CoefficientSeries::from_json(nlohmann::json::parse(text));
        })
        .def("__eq__", [](const CoefficientSeries& a, const CoefficientSeries& b) {
            return a == b;
        });

    py::class_<DilatedSeries>(m, "DilatedSeries")
        .def_property_readonly("r", &DilatedSeries::r)
        .def_property_readonly("coefficients",
                               [](const DilatedSeries& f) {
                                   std::map<std::uint64_t, Complex> out(
                                       f.coefficients().begin(), f.coefficients().end());
                                   return out;
                               })
        .def("as_series", &DilatedSeries::as_series);

    m.def("dilate", &dilate, py::arg("f"), py::arg("r"));
    m.def("dilation_compose_error", &dilation_compose_error, py::arg("f"), py::arg("r"),
          py::arg("r2"));
    m.def("norm2_exact", py::overload_cast<const CoefficientSeries&>(&norm2_exact), py::arg("f"));
    m.def("norm2_exact_dilated", py::overload_cast<const DilatedSeries&>(&norm2_exact),
          py::arg("f"));
    m.def("partial_sum", &partial_sum, py::arg("f"), py::arg("m"));
    m.def(
        "multiplier_apply",
        [](const std::map<std::uint64_t, Complex>& values, std::optional<Complex> dflt,
           const CoefficientSeries& f) {
            return multiplier_apply(Multiplier(values, dflt), f);
        },
        py::arg("values"), py::arg("default_value"), py::arg("f"));

    // ---- norm estimation ----
    py::class_<NormEstimate>(m, "NormEstimate")
        .def_readonly("p", &NormEstimate::p)
        .def_readonly("r", &NormEstimate::r)
        .def_readonly("mean", &NormEstimate::mean)
        .def_readonly("stderr", &NormEstimate::stderr_)
        .def_readonly("samples", &NormEstimate::samples)
        .def_readonly("label", &NormEstimate::label)
        .def("to_json", [](const NormEstimate& e) { return e.to_json().dump(); })
        .def("csv_row", &NormEstimate::csv_row);

    m.def("mc_norm", &mc_norm, py::arg("f"), py::arg("p"), py::arg("r"), py::arg("samples"),
          py::arg("seed"));
    m.def("norm_profile", &norm_profile, py::arg("f"), py::arg("p"), py::arg("ladder"),
          py::arg("samples"), py::arg("seed"));
    m.def("profile_monotone_ok", &profile_monotone_ok, py::arg("profile"));

    // ---- randomization ----
    py::class_<RandomModel>(m, "RandomModel")
        .def_static("bernoulli", &RandomModel::bernoulli)
        .def_static("steinhaus", &RandomModel::steinhaus)
        .def_static("gaussian_iid", &RandomModel::gaussian_iid)
        .def_static(
            "gaussian_process_diag",
            [](std::vector<double> mean, std::vector<double> variances) {
                return RandomModel::gaussian_process_diag(std::move(mean), std::move(variances));
            },
            py::arg("mean"), py::arg("variances"))
        .def_static("from_json", &model_from_json_str, py::arg("text"))
        .def("to_json", [](const RandomModel& mm) { return mm.to_json().dump(); })
        .def_property_readonly("centered", &RandomModel::centered)
        .def_property_readonly("clipped", &RandomModel::clipped);

    py::class_<Realization>(m, "Realization")
        .def_static("draw", &Realization::draw, py::arg("model"), py::arg("n"), py::arg("stream"))
        .def("value", &Realization::value, py::arg("n"))
        .def("covers", &Realization::covers, py::arg("n"))
        .def("size", &Realization::size);

    py::class_<RngStream>(m, "RngStream")
        .def_static("from_seed", &RngStream::from_seed, py::arg("master"), py::arg("label"))
        .def("substream", &RngStream::substream, py::arg("index"));

    m.def("randomize", &randomize, py::arg("f"), py::arg("x"));
    m.def(
        "randomized_moment",
        [](const CoefficientSeries& f, const RandomModel& model, double p, double r,
           std::uint64_t outer, std::uint64_t inner, std::uint64_t seed) {
            return randomized_moment(f, model, p, r, outer, inner, seed).to_json().dump();
        },
        py::arg("f"), py::arg("model"), py::arg("p"), py::arg("r"), py::arg("outer"),
        py::arg("inner"), py::arg("seed"));
    m.def(
        "operator_norm_estimate",
        [](const RandomModel& model, double p, const std::vector<CoefficientSeries>& probes,
           double r, std::uint64_t outer, std::uint64_t inner, std::uint64_t seed) {
            return operator_norm_estimate(model, p, probes, r, outer, inner, seed)
                .to_json()
                .dump();
        },
        py::arg("model"), py::arg("p"), py::arg("probes"), py::arg("r"), py::arg("outer"),
        py::arg("inner"), py::arg("seed"));
    m.def("gaussian_tail_bound", [](double x) {
        auto b = gaussian_tail_bound(x);
        return py::make_tuple(b.upper_tail ? py::object(py::float_(*b.upper_tail))
                                           : py::object(py::none()),
                              b.small_ball);
    });

    // ---- convergence ----
    m.def(
        "root_test",
        [](const std::vector<double>& x, std::uint64_t start, double margin) {
            return root_test(x, start, margin).to_json().dump();
        },
        py::arg("x"), py::arg("start_index"), py::arg("margin") = 0.05);
    m.def(
        "geometric_weight_sum",
        [](double beta, std::uint64_t w) { return geometric_weight_sum(beta, w).to_json().dump(); },
        py::arg("beta"), py::arg("max_weight"));

    // ---- Dirichlet bridge ----
    py::class_<DirichletPolynomial>(m, "DirichletPolynomial")
        .def(py::init([](const std::map<std::uint64_t, Complex>& terms) {
                 return DirichletPolynomial(terms);
             }),
             py::arg("terms"))
        .def_property_readonly("terms",
                               [](const DirichletPolynomial& q) {
                                   std::map<std::uint64_t, Complex> out(q.terms().begin(),
                                                                        q.terms().end());
                                   return out;
                               })
        .def("to_json", [](const DirichletPolynomial& q) { return q.to_json().dump(); })
        .def_static("from_json",
                    [](const std::string& text) {
                        return DirichletPolynomial::from_json(nlohmann::json::parse(text));
                    })
        .def("__eq__",
             [](const DirichletPolynomial& a, const DirichletPolynomial& b) { return a == b; });

    m.def("evaluate_dirichlet", &evaluate_dirichlet, py::arg("q"), py::arg("s"));
    m.def("vertical_translate", &vertical_translate, py::arg("q"), py::arg("sigma"));
    m.def("bohr_lift", &bohr_lift, py::arg("q"));
    m.def("bohr_inverse", &bohr_inverse, py::arg("f"));
    m.def(
        "besicovitch_norm",
        [](const DirichletPolynomial& q, double p, double T, double step) {
            return besicovitch_norm(q, p, T, step).to_json().dump();
        },
        py::arg("q"), py::arg("p"), py::arg("T"), py::arg("step"));
    m.def("besicovitch_default_step", &besicovitch_default_step, py::arg("q"));
    m.def(
        "isometry_check",
        [](const DirichletPolynomial& q, double p, double T, std::uint64_t samples,
           std::uint64_t seed) { return isometry_check(q, p, T, samples, seed).to_json().dump(); },
        py::arg("q"), py::arg("p"), py::arg("T"), py::arg("samples"), py::arg("seed"));

    // ---- experiments ----
    auto run = [](ExperimentReport (*runner)(const ExperimentConfig&)) {
        return [runner](const std::string& config_json) {
            return runner(config_from_json_str(config_json)).full_json().dump();
        };
    };
    m.def("run_dichotomy", run(&run_dichotomy), py::arg("config_json"));
    m.def("run_khintchine", run(&run_khintchine), py::arg("config_json"));
    m.def("run_mean_shift", run(&run_mean_shift), py::arg("config_json"));
    m.def("run_bohr", run(&run_bohr), py::arg("config_json"));
    m.def(
        "make_family",
        [](const std::string& name, const std::string& cutoff) {
            return make_family(name, parse_cutoff(cutoff));
        },
        py::arg("name"), py::arg("cutoff"));
    m.def("family_names", &family_names);
    m.def("family_is_l2", &family_is_l2, py::arg("name"));
}
