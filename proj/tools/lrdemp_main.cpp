// lrdemp command line: simulation, coefficient tables, chain grids and the
// Monte Carlo verification experiments.
//
// Exit statuses: 0 pass, 1 verification failure, 2 usage, 3 numeric or
// generation failure, 4 hypothesis violation or degeneracy.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrdemp/chain_grid.hpp"
#include "lrdemp/empirical.hpp"
#include "lrdemp/montecarlo.hpp"
#include "lrdemp/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitHypothesis = 4;

namespace fs = std::filesystem;
using lrdemp::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError(field + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw UsageError(field + ": empty list");
    return out;
}

lrdemp::CovarianceModel parse_model(const std::string& model, double hurst) {
    if (model == "white") return lrdemp::CovarianceModel::white();
    if (model == "fgn") {
        if (!(hurst > 0.5 && hurst < 1.0)) {
            throw UsageError("--hurst: must lie in (0.5, 1), got " + std::to_string(hurst));
        }
        return lrdemp::CovarianceModel::fgn(hurst);
    }
    if (model.rfind("explicit:", 0) == 0) {
        const std::string path = model.substr(9);
        std::ifstream in(path);
        if (!in) throw UsageError("--model: cannot open covariance file " + path);
        std::vector<double> lags;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                lags.push_back(std::stod(line));
            } catch (const std::exception&) {
                throw UsageError("--model: bad covariance line '" + line + "' in " + path);
            }
        }
        if (lags.empty()) throw UsageError("--model: covariance file " + path + " is empty");
        if (lags[0] != 1.0) throw UsageError("--model: explicit covariance needs r(0) = 1");
        return lrdemp::CovarianceModel::explicit_sequence(std::move(lags));
    }
    throw UsageError("--model: expected fgn, white or explicit:<file>, got '" + model + "'");
}

lrdemp::SubordinationFunction parse_g(const std::string& g) {
    if (g == "identity") return lrdemp::SubordinationFunction::identity();
    if (g == "square") return lrdemp::SubordinationFunction::square();
    if (g == "cube") return lrdemp::SubordinationFunction::cube();
    if (g.rfind("hermite:", 0) == 0) {
        return lrdemp::SubordinationFunction::hermite_combo(
            parse_number_list(g.substr(8), "--g hermite"));
    }
    throw UsageError("--g: expected identity, square, cube or hermite:<c0,c1,...>, got '" + g +
                     "'");
}

ordered_json default_config_json() {
    return lrdemp::config_to_json(lrdemp::ExperimentConfig{});
}

// Loads an experiment config from JSON, collecting every invalid field.
lrdemp::ExperimentConfig config_from_json(const ordered_json& j) {
    lrdemp::ExperimentConfig cfg;
    std::vector<std::string> issues;

    auto bad = [&issues](const std::string& path, const std::string& what) {
        issues.push_back(path + ": " + what);
    };

    if (j.contains("model")) {
        const auto& m = j["model"];
        std::string kind = m.value("kind", "fgn");
        if (kind == "white") {
            cfg.model = lrdemp::CovarianceModel::white();
        } else if (kind == "fgn") {
            double hurst = m.value("hurst", 0.75);
            if (!(hurst > 0.5 && hurst < 1.0)) {
                bad("model.hurst", "must lie in (0.5, 1)");
            } else {
                cfg.model = lrdemp::CovarianceModel::fgn(hurst);
            }
        } else if (kind == "explicit") {
            if (!m.contains("lags") || !m["lags"].is_array() || m["lags"].empty()) {
                bad("model.lags", "explicit model needs a nonempty lag array");
            } else {
                std::vector<double> lags = m["lags"].get<std::vector<double>>();
                if (lags[0] != 1.0) {
                    bad("model.lags", "r(0) must equal 1");
                } else {
                    cfg.model = lrdemp::CovarianceModel::explicit_sequence(std::move(lags));
                }
            }
        } else {
            bad("model.kind", "expected fgn, white or explicit");
        }
    }
    if (j.contains("g")) {
        try {
            cfg.g = parse_g(j["g"].get<std::string>());
        } catch (const std::exception& e) {
            bad("g", e.what());
        }
    }
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("lambda") && !j["lambda"].is_null()) {
        cfg.lambda_override = j["lambda"].get<double>();
    }
    if (j.contains("n_ladder")) cfg.n_ladder = j["n_ladder"].get<std::vector<std::size_t>>();
    if (j.contains("replications")) cfg.replications = j["replications"].get<std::size_t>();
    if (j.contains("epsilon_grid")) cfg.epsilon_grid = j["epsilon_grid"].get<std::vector<double>>();
    if (j.contains("x_probes")) cfg.x_probes = j["x_probes"].get<std::vector<double>>();
    if (j.contains("t_probes")) cfg.t_probes = j["t_probes"].get<std::vector<double>>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
    if (j.contains("keep_raw")) cfg.keep_raw = j["keep_raw"].get<bool>();
    if (j.contains("mesh_step")) cfg.mesh_step = j["mesh_step"].get<double>();
    if (j.contains("tail_tol")) cfg.tail_tol = j["tail_tol"].get<double>();
    if (j.contains("ks_bias_margin")) cfg.ks_bias_margin = j["ks_bias_margin"].get<double>();
    if (j.contains("rank_tol")) cfg.rank_tol = j["rank_tol"].get<double>();

    for (const auto& issue : cfg.validate()) issues.push_back(issue);
    if (!issues.empty()) {
        std::string all = "invalid config:";
        for (const auto& i : issues) all += "\n  " + i;
        throw UsageError(all);
    }
    return cfg;
}

lrdemp::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config: cannot open " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError("--config: JSON parse failure in " + path + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        // mistyped fields (string where a number belongs, ...) are usage errors
        throw UsageError("--config: " + std::string(e.what()));
    }
}

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out);
}

void write_report_document(const std::string& path, const lrdemp::ExperimentConfig& cfg,
                           std::initializer_list<ordered_json> sections) {
    ordered_json doc;
    doc["tool"] = "lrdemp";
    ordered_json echo = lrdemp::config_to_json(cfg);
    // The worker budget is an execution detail: results are parallelism
    // invariant, so reports must be byte-identical across it.
    echo.erase("workers");
    doc["config"] = std::move(echo);
    ordered_json reports = ordered_json::array();
    for (const auto& s : sections) reports.push_back(s);
    doc["reports"] = std::move(reports);
    lrdemp::write_text_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------
int cmd_simulate(const std::string& model_name, double hurst, const std::string& g_name,
                 std::size_t n, std::uint64_t seed, double delta,
                 std::optional<double> lambda_override, bool with_field,
                 const std::string& out) {
    auto model = parse_model(model_name, hurst);
    auto g = parse_g(g_name);

    lrdemp::HermiteProfile::Options opts;
    opts.delta = delta;
    opts.lambda_override = lambda_override;
    auto profile = lrdemp::HermiteProfile::build(g, opts);

    auto path = lrdemp::generate_path(model, n, seed);
    auto sample = lrdemp::subordinate(path, g);
    double d_n = lrdemp::normalization_dN(model, profile.rank(), n);
    auto moment = lrdemp::moment_estimate(g, delta);

    ensure_out_dir(out);
    const std::string csv_path = out + "/path.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    csv << "j,x,y\n";
    char buf[96];
    for (std::size_t j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", j, path.values[j], sample.y[j]);
        csv << buf;
    }

    if (with_field) {
        lrdemp::GridBuildOptions grid_opts;
        grid_opts.extra_x = {-1.0, 0.0, 1.0};
        grid_opts.t_nodes = {0.25, 0.5, 0.75, 1.0};
        auto grid = lrdemp::build_grid(profile, n, d_n, grid_opts);
        auto field = lrdemp::sequential_empirical(sample, profile, grid, d_n);
        lrdemp::write_field_csv(field, out + "/field.csv");
        std::printf("wrote %s\n", (out + "/field.csv").c_str());
    }

    std::printf("model = %s\n", model.describe().c_str());
    std::printf("g = %s\n", g.name().c_str());
    std::printf("N = %zu, seed = %llu\n", n, static_cast<unsigned long long>(seed));
    std::printf("m = %u\n", profile.rank());
    std::printf("d_N = %.10g\n", d_n);
    std::printf("E|Y|^delta (delta = %g) = %.10g%s\n", delta, moment.value,
                moment.tail_risk ? "  [tail decay slow: divergence risk]" : "");
    std::printf("lambda = %.10g\n", profile.lambda());
    std::printf("wrote %s\n", csv_path.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// coefficients
// ---------------------------------------------------------------------------
int cmd_coefficients(const std::string& g_name, unsigned q_max, std::optional<double> x_single,
                     std::optional<unsigned> q_single, double lambda, double x_lo, double x_hi,
                     double x_step, const std::string& out) {
    auto g = parse_g(g_name);

    if (x_single && q_single) {
        std::printf("J_%u(%g) = %.7f\n", *q_single, *x_single,
                    lrdemp::hermite_coefficient(g, *q_single, *x_single));
        return kExitOk;
    }

    unsigned rank = 0;
    try {
        rank = lrdemp::hermite_rank(g);
    } catch (const lrdemp::RankUndetectedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitHypothesis;
    }

    ensure_out_dir(out);
    const std::string csv_path = out + "/coefficients.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    csv << "x";
    unsigned q_lo = q_single.value_or(1);
    unsigned q_hi = q_single.value_or(q_max);
    for (unsigned q = q_lo; q <= q_hi; ++q) csv << ",J" << q;
    csv << "\n";
    char buf[64];
    for (double x = x_lo; x <= x_hi + 0.5 * x_step; x += x_step) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        csv << buf;
        for (unsigned q = q_lo; q <= q_hi; ++q) {
            std::snprintf(buf, sizeof(buf), ",%.17g", lrdemp::hermite_coefficient(g, q, x));
            csv << buf;
        }
        csv << "\n";
    }

    std::printf("g = %s\n", g.name().c_str());
    std::printf("m = %u\n", rank);
    std::printf("%-4s %-14s %-12s %s\n", "q", "sup|w.J_q|", "arg max", "stabilized");
    for (unsigned q = q_lo; q <= q_hi; ++q) {
        auto sup = lrdemp::weighted_coefficient_sup(g, q, lambda);
        std::printf("%-4u %-14.7f %-12.4f %s\n", q, sup.value, sup.arg_max,
                    sup.stabilized ? "yes" : "NO: still growing at radius 1e6");
    }
    std::printf("wrote %s\n", csv_path.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-reduction
// ---------------------------------------------------------------------------
int cmd_verify_reduction(const lrdemp::ExperimentConfig& cfg, const std::string& out) {
    ensure_out_dir(out);
    auto reduction = lrdemp::run_reduction_experiment(cfg);
    auto moments = lrdemp::run_moment_check(cfg, 1.0, {{-1.0, 1.0}});

    write_report_document(out + "/reduction_report.json", cfg,
                          {lrdemp::report_to_json(reduction), lrdemp::report_to_json(moments)});

    std::ofstream csv(out + "/reduction_decay.csv", std::ios::binary);
    csv << "epsilon,N,p_hat,se\n";
    char buf[128];
    for (const auto& d : reduction.decay) {
        for (std::size_t i = 0; i < reduction.n_ladder.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g,%.17g\n", d.epsilon,
                          reduction.n_ladder[i], d.p_hat[i], d.se[i]);
            csv << buf;
        }
    }
    if (cfg.keep_raw && !reduction.raw_mn.empty()) {
        std::ofstream raw(out + "/reduction_raw.csv", std::ios::binary);
        raw << "N,replication,M_N\n";
        for (std::size_t i = 0; i < reduction.n_ladder.size(); ++i) {
            for (std::size_t r = 0; r < reduction.raw_mn[i].size(); ++r) {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g\n", reduction.n_ladder[i], r,
                              reduction.raw_mn[i][r]);
                raw << buf;
            }
        }
    }

    for (const auto& notice : reduction.notices) std::printf("notice: %s\n", notice.c_str());
    for (const auto& notice : moments.notices) std::printf("notice: %s\n", notice.c_str());
    bool pass = reduction.all_pass && moments.all_pass;
    std::printf("reduction decay: %s\n", reduction.all_pass ? "pass" : "FAIL");
    std::printf("moment direction: %s\n", moments.all_pass ? "pass" : "FAIL");
    std::printf("wrote %s\n", (out + "/reduction_report.json").c_str());
    return pass ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// verify-limit
// ---------------------------------------------------------------------------
int cmd_verify_limit(const lrdemp::ExperimentConfig& cfg, const std::string& out) {
    ensure_out_dir(out);
    auto limit = lrdemp::run_limit_experiment(cfg);

    write_report_document(out + "/limit_report.json", cfg, {lrdemp::report_to_json(limit)});

    std::ofstream csv(out + "/limit_ks.csv", std::ios::binary);
    csv << "N,x,t,ks,threshold\n";
    char buf[160];
    for (const auto& probe : limit.probes) {
        if (probe.skipped) continue;
        for (std::size_t i = 0; i < limit.n_ladder.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", limit.n_ladder[i],
                          probe.x, probe.t, probe.ks[i], limit.threshold);
            csv << buf;
        }
    }

    if (cfg.keep_raw && !limit.raw_values.empty()) {
        std::ofstream raw(out + "/limit_raw.csv", std::ios::binary);
        raw << "N,x,t,replication,value\n";
        for (std::size_t i = 0; i < limit.n_ladder.size(); ++i) {
            for (std::size_t p = 0; p < limit.probes.size(); ++p) {
                if (limit.probes[p].skipped) continue;
                for (std::size_t r = 0; r < limit.raw_values[i][p].size(); ++r) {
                    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%zu,%.17g\n",
                                  limit.n_ladder[i], limit.probes[p].x, limit.probes[p].t, r,
                                  limit.raw_values[i][p][r]);
                    raw << buf;
                }
            }
        }
    }

    for (const auto& notice : limit.notices) std::printf("notice: %s\n", notice.c_str());
    if (limit.flags_suppressed) {
        std::printf("warning: R < 100: distributional flags suppressed\n");
        std::printf("wrote %s\n", (out + "/limit_report.json").c_str());
        return kExitOk;
    }
    std::printf("limit convergence: %s\n", limit.all_pass ? "pass" : "FAIL");
    std::printf("wrote %s\n", (out + "/limit_report.json").c_str());
    return limit.all_pass ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// chain-grid
// ---------------------------------------------------------------------------
int cmd_chain_grid(const std::string& g_name, double delta, std::optional<double> lambda_override,
                   unsigned k_max, std::size_t i_max, const std::string& out) {
    auto g = parse_g(g_name);
    lrdemp::HermiteProfile::Options opts;
    opts.delta = delta;
    opts.lambda_override = lambda_override;
    auto profile = lrdemp::HermiteProfile::build(g, opts);

    ensure_out_dir(out);
    ordered_json sections = ordered_json::array();
    bool pass = true;
    for (auto side : {lrdemp::ChainSide::Positive, lrdemp::ChainSide::Negative}) {
        auto grid = lrdemp::build_chain_grid(profile, side, k_max, i_max);
        auto report = lrdemp::verify_chain_grid(grid, profile);
        const char* tag = side == lrdemp::ChainSide::Positive ? "positive" : "negative";
        lrdemp::write_chain_grid_csv(grid, report, out + "/chain_grid_" + tag + ".csv");
        sections.push_back(lrdemp::report_to_json(report));
        pass = pass && report.all_pass;
        if (grid.empty_side) {
            std::printf("notice: %s side carries no marginal mass; trivial grid\n", tag);
        } else {
            double worst = 0.0;
            for (const auto& lv : report.levels) worst = std::min(worst, lv.min_slack);
            std::printf("%s side: %u levels, worst slack %.3e, %s\n", tag, k_max + 1, worst,
                        report.all_pass ? "pass" : "FAIL");
        }
    }

    ordered_json doc;
    doc["tool"] = "lrdemp";
    doc["g"] = g.name();
    doc["lambda"] = profile.lambda();
    doc["rank"] = profile.rank();
    doc["anchor"] = profile.majorant(0.0);
    doc["reports"] = std::move(sections);
    lrdemp::write_text_file(out + "/chain_grid_report.json", doc.dump(2) + "\n");
    std::printf("wrote %s\n", (out + "/chain_grid_report.json").c_str());
    return pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lrdemp: long-range dependent Gaussian subordination toolkit.\n"
        "Simulates subordinated sequences, computes Hermite-expansion profiles\n"
        "and verifies weighted empirical-process limit behaviour by Monte Carlo.\n"
        "\n"
        "Exit statuses: 0 pass, 1 verification failure, 2 usage error,\n"
        "3 numeric/generation failure, 4 hypothesis violation or degeneracy.\n"
        "\n"
        "Model note: fgn uses r(k) = ((k+1)^2H - 2k^2H + (k-1)^2H)/2 with memory\n"
        "exponent D = 2 - 2H, so H in (0.5, 1) corresponds to D in (0, 1)."};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a path and its subordinated sample");
    std::string sim_model = "fgn", sim_g = "identity", sim_out = ".";
    double sim_hurst = 0.75, sim_delta = 3.0;
    std::size_t sim_n = 1024;
    std::uint64_t sim_seed = 42;
    std::optional<double> sim_lambda;
    bool sim_field = false;
    sim->add_option("--model", sim_model, "fgn, white or explicit:<file>");
    sim->add_option("--hurst", sim_hurst, "Hurst exponent in (0.5, 1) for fgn");
    sim->add_option("--g", sim_g, "identity, square, cube or hermite:<c0,c1,...>");
    sim->add_option("--n", sim_n, "path length")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "generator seed");
    sim->add_option("--delta", sim_delta, "moment exponent");
    sim->add_option("--lambda", sim_lambda, "weight exponent override (default delta/3; delta/2 is the experimental sharper weighting)");
    sim->add_flag("--field", sim_field,
                  "also write the normalized sequential empirical field as CSV");
    sim->add_option("--out", sim_out, "output directory");

    // coefficients
    auto* coef = app.add_subcommand("coefficients", "Hermite coefficient tables J_q(x)");
    std::string coef_g = "identity", coef_out = ".";
    unsigned coef_qmax = 6;
    std::optional<double> coef_x;
    std::optional<unsigned> coef_q;
    double coef_lambda = 1.0, coef_lo = -8.0, coef_hi = 8.0, coef_step = 0.05;
    coef->add_option("--g", coef_g, "identity, square, cube or hermite:<c0,c1,...>");
    coef->add_option("--q", coef_q, "single order to tabulate");
    coef->add_option("--q-max", coef_qmax, "largest order when --q is absent");
    coef->add_option("--x", coef_x, "evaluate at a single point (with --q)");
    coef->add_option("--lambda", coef_lambda, "weight exponent for the sup summary");
    coef->add_option("--x-lo", coef_lo, "grid start");
    coef->add_option("--x-hi", coef_hi, "grid end");
    coef->add_option("--x-step", coef_step, "grid step");
    coef->add_option("--out", coef_out, "output directory");

    // shared experiment options
    auto add_experiment_options = [](CLI::App* cmd, std::string& config_path,
                                     std::string& model, double& hurst, std::string& g,
                                     std::optional<std::size_t>& reps,
                                     std::optional<std::string>& ladder,
                                     std::optional<std::string>& epsilon,
                                     std::optional<double>& lambda,
                                     std::optional<double>& delta,
                                     std::optional<std::uint64_t>& seed,
                                     std::optional<unsigned>& workers, bool& keep_raw,
                                     std::string& out) {
        cmd->add_option("--config", config_path, "JSON experiment config");
        cmd->add_option("--model", model, "override: fgn, white or explicit:<file>");
        cmd->add_option("--hurst", hurst, "override: Hurst exponent");
        cmd->add_option("--g", g, "override: subordination map");
        cmd->add_option("--reps", reps, "override: replications per ladder length");
        cmd->add_option("--n-ladder", ladder, "override: comma list of lengths");
        cmd->add_option("--epsilon", epsilon, "override: comma list of tail thresholds");
        cmd->add_option("--lambda", lambda,
                        "override: weight exponent (default delta/3; delta/2 is the "
                        "experimental sharper weighting)");
        cmd->add_option("--delta", delta, "override: moment exponent");
        cmd->add_option("--seed", seed, "override: master seed");
        cmd->add_option("--workers", workers, "override: worker budget (0 = hardware)");
        cmd->add_flag("--keep-raw", keep_raw, "write per-replication CSV");
        cmd->add_option("--out", out, "output directory");
    };

    struct ExperimentFlags {
        std::string config_path;
        std::string model = "";
        double hurst = 0.75;
        std::string g = "";
        std::optional<std::size_t> reps;
        std::optional<std::string> ladder;
        std::optional<std::string> epsilon;
        std::optional<double> lambda;
        std::optional<double> delta;
        std::optional<std::uint64_t> seed;
        std::optional<unsigned> workers;
        bool keep_raw = false;
        std::string out = ".";
    };

    auto* vred = app.add_subcommand("verify-reduction",
                                    "Monte Carlo check of the weighted reduction principle");
    ExperimentFlags red_flags;
    add_experiment_options(vred, red_flags.config_path, red_flags.model, red_flags.hurst,
                           red_flags.g, red_flags.reps, red_flags.ladder, red_flags.epsilon,
                           red_flags.lambda, red_flags.delta, red_flags.seed, red_flags.workers,
                           red_flags.keep_raw, red_flags.out);

    auto* vlim = app.add_subcommand("verify-limit",
                                    "Monte Carlo check of convergence to the Hermite limit");
    ExperimentFlags lim_flags;
    add_experiment_options(vlim, lim_flags.config_path, lim_flags.model, lim_flags.hurst,
                           lim_flags.g, lim_flags.reps, lim_flags.ladder, lim_flags.epsilon,
                           lim_flags.lambda, lim_flags.delta, lim_flags.seed, lim_flags.workers,
                           lim_flags.keep_raw, lim_flags.out);

    // chain-grid
    auto* chain = app.add_subcommand("chain-grid", "Build and verify the chaining partitions");
    std::string chain_g = "identity", chain_out = ".";
    double chain_delta = 3.0;
    std::optional<double> chain_lambda;
    unsigned chain_kmax = 8;
    std::size_t chain_imax = 10000;
    chain->add_option("--g", chain_g, "identity, square, cube or hermite:<c0,c1,...>");
    chain->add_option("--delta", chain_delta, "moment exponent");
    chain->add_option("--lambda", chain_lambda, "weight exponent override (default delta/3; delta/2 is the experimental sharper weighting)");
    chain->add_option("--kmax", chain_kmax, "finest refinement level");
    chain->add_option("--imax", chain_imax, "node budget per level")->check(CLI::PositiveNumber);
    chain->add_option("--out", chain_out, "output directory");

    // config
    auto* conf = app.add_subcommand("config", "Inspect experiment configuration");
    bool print_defaults = false;
    conf->add_flag("--print-defaults", print_defaults, "print the full default config as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return kExitOk;  // --help
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    }

    auto build_config = [&](const ExperimentFlags& flags) {
        lrdemp::ExperimentConfig cfg = flags.config_path.empty()
                                           ? lrdemp::ExperimentConfig{}
                                           : load_config(flags.config_path);
        if (!flags.model.empty()) cfg.model = parse_model(flags.model, flags.hurst);
        if (!flags.g.empty()) cfg.g = parse_g(flags.g);
        if (flags.reps) cfg.replications = *flags.reps;
        if (flags.ladder) {
            cfg.n_ladder.clear();
            for (double v : parse_number_list(*flags.ladder, "--n-ladder")) {
                cfg.n_ladder.push_back(static_cast<std::size_t>(v));
            }
        }
        if (flags.epsilon) cfg.epsilon_grid = parse_number_list(*flags.epsilon, "--epsilon");
        if (flags.lambda) cfg.lambda_override = *flags.lambda;
        if (flags.delta) cfg.delta = *flags.delta;
        if (flags.seed) cfg.master_seed = *flags.seed;
        if (flags.workers) cfg.workers = *flags.workers;
        cfg.keep_raw = cfg.keep_raw || flags.keep_raw;
        auto issues = cfg.validate();
        if (!issues.empty()) {
            std::string all = "invalid config:";
            for (const auto& i : issues) all += "\n  " + i;
            throw UsageError(all);
        }
        return cfg;
    };

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_model, sim_hurst, sim_g, sim_n, sim_seed, sim_delta,
                                sim_lambda, sim_field, sim_out);
        }
        if (coef->parsed()) {
            return cmd_coefficients(coef_g, coef_qmax, coef_x, coef_q, coef_lambda, coef_lo,
                                    coef_hi, coef_step, coef_out);
        }
        if (vred->parsed()) return cmd_verify_reduction(build_config(red_flags), red_flags.out);
        if (vlim->parsed()) return cmd_verify_limit(build_config(lim_flags), lim_flags.out);
        if (chain->parsed()) {
            return cmd_chain_grid(chain_g, chain_delta, chain_lambda, chain_kmax, chain_imax,
                                  chain_out);
        }
        if (conf->parsed()) {
            if (print_defaults) {
                std::printf("%s\n", default_config_json().dump(2).c_str());
            } else {
                std::printf("use --print-defaults to emit the default experiment config\n");
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const lrdemp::HypothesisError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitHypothesis;
    } catch (const lrdemp::RankUndetectedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitHypothesis;
    } catch (const lrdemp::ChainGridError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitHypothesis;
    } catch (const lrdemp::EmbeddingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
