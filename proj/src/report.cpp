#include "lrdemp/report.hpp"

#include <fstream>

namespace lrdemp {

namespace {

ordered_json model_to_json(const CovarianceModel& model) {
    ordered_json j;
    switch (model.kind()) {
        case CovarianceKind::WhiteNoise:
            j["kind"] = "white";
            break;
        case CovarianceKind::FractionalGaussianNoise:
            j["kind"] = "fgn";
            j["hurst"] = model.hurst();
            break;
        case CovarianceKind::ExplicitSequence:
            j["kind"] = "explicit";
            break;
    }
    return j;
}

ordered_json slope_to_json(const SlopeFit& fit) {
    ordered_json j;
    j["defined"] = fit.ok;
    j["points"] = fit.points;
    if (fit.ok) {
        j["slope"] = fit.slope;
        j["intercept"] = fit.intercept;
        j["se"] = fit.se;
        j["half_width_95"] = fit.half_width_95;
    }
    return j;
}

}  // namespace

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["model"] = model_to_json(cfg.model);
    j["g"] = cfg.g.name();
    j["delta"] = cfg.delta;
    if (cfg.lambda_override) {
        j["lambda"] = *cfg.lambda_override;
        j["lambda_source"] = "override";
    } else {
        j["lambda"] = cfg.delta / 3.0;
        j["lambda_source"] = "delta/3";
    }
    j["n_ladder"] = cfg.n_ladder;
    j["replications"] = cfg.replications;
    j["epsilon_grid"] = cfg.epsilon_grid;
    j["x_probes"] = cfg.x_probes;
    j["t_probes"] = cfg.t_probes;
    j["master_seed"] = cfg.master_seed;
    j["workers"] = cfg.workers;
    j["keep_raw"] = cfg.keep_raw;
    j["mesh_step"] = cfg.mesh_step;
    j["tail_tol"] = cfg.tail_tol;
    j["ks_bias_margin"] = cfg.ks_bias_margin;
    j["rank_tol"] = cfg.rank_tol;
    return j;
}

ordered_json report_to_json(const ReductionReport& report) {
    ordered_json j;
    j["kind"] = "reduction";
    j["rank"] = report.rank;
    j["lambda"] = report.lambda;
    j["n_ladder"] = report.n_ladder;
    j["d_n"] = report.d_n;
    ordered_json decay = ordered_json::array();
    for (const auto& d : report.decay) {
        ordered_json e;
        e["epsilon"] = d.epsilon;
        e["exceed_counts"] = d.exceed_counts;
        e["p_hat"] = d.p_hat;
        e["se"] = d.se;
        e["nonincreasing_within_2se"] = d.nonincreasing_within_2se;
        e["all_zero"] = d.all_zero;
        e["slope"] = slope_to_json(d.slope);
        ordered_json wls;
        wls["defined"] = d.wls_defined;
        if (d.wls_defined) {
            wls["slope"] = d.wls_slope;
            wls["se"] = d.wls_se;
        }
        e["slope_weighted"] = std::move(wls);
        e["slope_negative_95"] = d.slope_negative_95;
        decay.push_back(std::move(e));
    }
    j["decay"] = std::move(decay);
    j["notices"] = report.notices;
    j["all_pass"] = report.all_pass;
    return j;
}

ordered_json report_to_json(const MomentReport& report) {
    ordered_json j;
    j["kind"] = "moment";
    j["n_ladder"] = report.n_ladder;
    j["n_used"] = report.n_used;
    j["n_fraction"] = report.n_fraction;
    ordered_json pairs = ordered_json::array();
    for (const auto& p : report.pairs) {
        ordered_json e;
        e["x"] = p.x;
        e["y"] = p.y;
        e["f_xy"] = p.f_xy;
        e["skipped"] = p.skipped;
        if (!p.skipped) {
            e["second_moment"] = p.second_moment;
            e["se"] = p.se;
            e["ratio"] = p.ratio;
            e["ratio_se"] = p.ratio_se;
            e["decreasing_within_2se"] = p.decreasing_within_2se;
        }
        pairs.push_back(std::move(e));
    }
    j["pairs"] = std::move(pairs);
    j["notices"] = report.notices;
    j["all_pass"] = report.all_pass;
    return j;
}

ordered_json report_to_json(const LimitReport& report) {
    ordered_json j;
    j["kind"] = "limit";
    j["rank"] = report.rank;
    j["n_ladder"] = report.n_ladder;
    j["d_n"] = report.d_n;
    j["surrogate_length"] = report.surrogate_length;
    j["threshold"] = report.threshold;
    j["null_band"] = report.null_band;
    j["flags_suppressed"] = report.flags_suppressed;
    ordered_json probes = ordered_json::array();
    for (const auto& p : report.probes) {
        ordered_json e;
        e["x"] = p.x;
        e["t"] = p.t;
        e["skipped"] = p.skipped;
        if (p.skipped) {
            e["skip_reason"] = p.skip_reason;
        } else {
            e["sigma_ref"] = p.sigma_ref;
            e["scale_ref"] = p.scale_ref;
            e["ks"] = p.ks;
            e["final_below_threshold"] = p.final_below_threshold;
            e["decreasing"] = p.decreasing;
        }
        probes.push_back(std::move(e));
    }
    j["probes"] = std::move(probes);
    j["notices"] = report.notices;
    j["all_pass"] = report.all_pass;
    return j;
}

ordered_json report_to_json(const ChainGridReport& report) {
    ordered_json j;
    j["kind"] = "chain_grid";
    j["side"] = report.side == ChainSide::Positive ? "positive" : "negative";
    ordered_json levels = ordered_json::array();
    for (const auto& level : report.levels) {
        ordered_json e;
        e["level"] = level.level;
        e["max_spacing"] = level.max_spacing;
        e["min_slack"] = level.min_slack;
        e["spacing_ok"] = level.spacing_ok;
        e["series_sum"] = level.series_sum;
        e["series_ratio"] = level.series_ratio;
        e["series_ok"] = level.series_ok;
        levels.push_back(std::move(e));
    }
    j["levels"] = std::move(levels);
    j["base_tail_sum"] = report.base_tail_sum;
    j["base_tail_last_increment"] = report.base_tail_last_increment;
    j["base_tail_stabilized"] = report.base_tail_stabilized;
    j["all_pass"] = report.all_pass;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
    out << content;
}

}  // namespace lrdemp
