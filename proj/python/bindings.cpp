// Python bindings for the core operations: simulation, Hermite analysis,
// empirical-process statistics and the Monte Carlo experiment runners.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrdemp/chain_grid.hpp"
#include "lrdemp/empirical.hpp"
#include "lrdemp/hermite.hpp"
#include "lrdemp/montecarlo.hpp"
#include "lrdemp/report.hpp"

namespace py = pybind11;
using namespace lrdemp;

namespace {

SubordinationFunction g_from_spec(const std::string& name,
                                  const std::vector<double>& coefficients) {
    if (name == "identity") return SubordinationFunction::identity();
    if (name == "square") return SubordinationFunction::square();
    if (name == "cube") return SubordinationFunction::cube();
    if (name == "hermite") return SubordinationFunction::hermite_combo(coefficients);
    throw std::invalid_argument("unknown subordination function: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Long-range dependent Gaussian subordination toolkit: exact path "
        "simulation, Hermite-expansion profiles and weighted empirical-process "
        "statistics.";

    py::class_<CovarianceModel>(m, "CovarianceModel")
        .def_static("fgn", &CovarianceModel::fgn, py::arg("hurst"))
        .def_static("white", &CovarianceModel::white)
        .def_static("explicit_sequence", &CovarianceModel::explicit_sequence, py::arg("lags"))
        .def("at", &CovarianceModel::at, py::arg("lag"))
        .def_property_readonly("memory_exponent",
                               [](const CovarianceModel& model) -> py::object {
                                   auto d = model.memory_exponent();
                                   if (!d) return py::none();
                                   return py::float_(*d);
                               })
        .def("__repr__", &CovarianceModel::describe);

    py::class_<SubordinationFunction>(m, "SubordinationFunction")
        .def_static("identity", &SubordinationFunction::identity)
        .def_static("square", &SubordinationFunction::square)
        .def_static("cube", &SubordinationFunction::cube)
        .def_static("hermite_combo", &SubordinationFunction::hermite_combo,
                    py::arg("coefficients"))
        .def_static("custom_monotone", &SubordinationFunction::custom_monotone, py::arg("g"),
                    py::arg("increasing"), py::arg("bracket_lo"), py::arg("bracket_hi"))
        .def("__call__",
             [](const SubordinationFunction& g, double s) { return g(s); })
        .def("sublevel",
             [](const SubordinationFunction& g, double x) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& iv : g.sublevel(x)) out.emplace_back(iv.lo, iv.hi);
                 return out;
             })
        .def_property_readonly("name", &SubordinationFunction::name);

    py::class_<GaussianPath>(m, "GaussianPath")
        .def_readonly("values", &GaussianPath::values)
        .def_readonly("seed", &GaussianPath::seed)
        .def("__len__", &GaussianPath::size);

    py::class_<SubordinatedSample>(m, "SubordinatedSample")
        .def_readonly("y", &SubordinatedSample::y)
        .def_readonly("g_id", &SubordinatedSample::g_id)
        .def("__len__", &SubordinatedSample::size);

    m.def("fgn_covariance", &fgn_covariance, py::arg("hurst"), py::arg("lag"));
    m.def("hermite_eval", &hermite_eval, py::arg("order"), py::arg("x"));
    m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("stream"));
    m.def("generate_path", &generate_path, py::arg("model"), py::arg("n"), py::arg("seed"));
    m.def("circulant_spectrum", &circulant_spectrum, py::arg("model"), py::arg("n"));
    m.def("subordinate", &subordinate, py::arg("path"), py::arg("g"));

    m.def("hermite_coefficient", &hermite_coefficient, py::arg("g"), py::arg("q"), py::arg("x"));
    m.def("marginal_cdf", &marginal_cdf, py::arg("g"), py::arg("x"));
    m.def("lambda_majorant", &lambda_majorant, py::arg("g"), py::arg("rank"), py::arg("x"));
    m.def(
        "hermite_rank",
        [](const SubordinationFunction& g, double tol, unsigned q_max) {
            RankOptions opts;
            opts.tol = tol;
            opts.q_max = q_max;
            return hermite_rank(g, opts);
        },
        py::arg("g"), py::arg("tol") = 1e-6, py::arg("q_max") = 8);
    m.def("normalization_dN", &normalization_dN, py::arg("model"), py::arg("rank"), py::arg("n"));
    m.def(
        "moment_estimate",
        [](const SubordinationFunction& g, double delta) {
            auto est = moment_estimate(g, delta);
            return py::make_tuple(est.value, est.tail_estimate, est.tail_risk);
        },
        py::arg("g"), py::arg("delta"));
    m.def(
        "weighted_coefficient_sup",
        [](const SubordinationFunction& g, unsigned q, double lambda) {
            auto rep = weighted_coefficient_sup(g, q, lambda);
            py::dict out;
            out["value"] = rep.value;
            out["arg_max"] = rep.arg_max;
            out["radius"] = rep.radius;
            out["stabilized"] = rep.stabilized;
            return out;
        },
        py::arg("g"), py::arg("q"), py::arg("lambda_"));

    m.def("chaining_depth", &chaining_depth, py::arg("n"), py::arg("d_n"), py::arg("epsilon"));

    m.def(
        "sequential_empirical",
        [](const std::vector<double>& y, const std::string& g_name,
           const std::vector<double>& g_coeffs, const std::vector<double>& x_nodes,
           const std::vector<double>& t_nodes, double d_n) {
            auto g = g_from_spec(g_name, g_coeffs);
            auto profile = HermiteProfile::build(g);
            GridSpec grid;
            grid.x_nodes = x_nodes;
            grid.t_nodes = t_nodes;
            grid.tail_tol = 1e30;
            SubordinatedSample sample{y, g.name(), 0};
            auto field = sequential_empirical(sample, profile, grid, d_n);
            std::vector<std::vector<double>> rows(field.nx,
                                                  std::vector<double>(field.nt));
            for (std::size_t ix = 0; ix < field.nx; ++ix) {
                for (std::size_t it = 0; it < field.nt; ++it) rows[ix][it] = field.at(ix, it);
            }
            return rows;
        },
        py::arg("y"), py::arg("g"), py::arg("g_coefficients"), py::arg("x_nodes"),
        py::arg("t_nodes"), py::arg("d_n"),
        "Normalized sequential empirical process values on the (x, t) grid.");

    m.def(
        "ks_distance",
        [](std::vector<double> sample, const std::function<double(double)>& cdf) {
            return ks_distance(std::move(sample), cdf);
        },
        py::arg("sample"), py::arg("cdf"));
    m.def(
        "ks_distance_two_sample",
        [](std::vector<double> a, std::vector<double> b) {
            return ks_distance(std::move(a), std::move(b));
        },
        py::arg("first"), py::arg("second"));
    m.def(
        "slope_fit",
        [](const std::vector<std::pair<double, double>>& pts) {
            auto fit = slope_fit(pts);
            py::dict out;
            out["ok"] = fit.ok;
            out["slope"] = fit.slope;
            out["intercept"] = fit.intercept;
            out["se"] = fit.se;
            out["half_width_95"] = fit.half_width_95;
            out["points"] = fit.points;
            return out;
        },
        py::arg("log_points"));

    auto run_with_config = [](const py::dict& overrides) {
        ExperimentConfig cfg;
        if (overrides.contains("hurst")) {
            cfg.model = CovarianceModel::fgn(overrides["hurst"].cast<double>());
        }
        if (overrides.contains("white") && overrides["white"].cast<bool>()) {
            cfg.model = CovarianceModel::white();
        }
        if (overrides.contains("g")) {
            std::vector<double> coeffs;
            if (overrides.contains("g_coefficients")) {
                coeffs = overrides["g_coefficients"].cast<std::vector<double>>();
            }
            cfg.g = g_from_spec(overrides["g"].cast<std::string>(), coeffs);
        }
        if (overrides.contains("n_ladder")) {
            cfg.n_ladder = overrides["n_ladder"].cast<std::vector<std::size_t>>();
        }
        if (overrides.contains("replications")) {
            cfg.replications = overrides["replications"].cast<std::size_t>();
        }
        if (overrides.contains("epsilon_grid")) {
            cfg.epsilon_grid = overrides["epsilon_grid"].cast<std::vector<double>>();
        }
        if (overrides.contains("x_probes")) {
            cfg.x_probes = overrides["x_probes"].cast<std::vector<double>>();
        }
        if (overrides.contains("t_probes")) {
            cfg.t_probes = overrides["t_probes"].cast<std::vector<double>>();
        }
        if (overrides.contains("master_seed")) {
            cfg.master_seed = overrides["master_seed"].cast<std::uint64_t>();
        }
        if (overrides.contains("workers")) {
            cfg.workers = overrides["workers"].cast<unsigned>();
        }
        return cfg;
    };

    m.def(
        "run_reduction_experiment",
        [run_with_config](const py::dict& overrides) {
            auto report = run_reduction_experiment(run_with_config(overrides));
            return py::module_::import("json").attr("loads")(report_to_json(report).dump());
        },
        py::arg("config"),
        "Runs the reduction-principle experiment; returns the report as a dict.");
    m.def(
        "run_limit_experiment",
        [run_with_config](const py::dict& overrides) {
            auto report = run_limit_experiment(run_with_config(overrides));
            return py::module_::import("json").attr("loads")(report_to_json(report).dump());
        },
        py::arg("config"),
        "Runs the Hermite-limit experiment; returns the report as a dict.");

    py::register_exception<EmbeddingError>(m, "EmbeddingError");
    py::register_exception<HypothesisError>(m, "HypothesisError");
    py::register_exception<RankUndetectedError>(m, "RankUndetectedError");
}
