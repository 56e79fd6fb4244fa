#include "lrdemp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "lrdemp/chain_grid.hpp"
#include "lrdemp/hermite.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp {

namespace {

double factorial(unsigned m) {
    double f = 1.0;
    for (unsigned q = 2; q <= m; ++q) f *= static_cast<double>(q);
    return f;
}

// Runs fn(rep) for rep = 0..total-1 across a pool; each slot writes its own
// results, so the outcome does not depend on the worker count.
void parallel_replications(std::size_t total, unsigned workers,
                           const std::function<void(std::size_t)>& fn) {
    unsigned pool = workers == 0 ? std::thread::hardware_concurrency() : workers;
    if (pool > total) pool = static_cast<unsigned>(total);
    if (pool <= 1) {
        for (std::size_t r = 0; r < total; ++r) fn(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t r = next.fetch_add(1);
            if (r >= total) return;
            try {
                fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool_threads;
    pool_threads.reserve(pool);
    for (unsigned i = 0; i < pool; ++i) pool_threads.emplace_back(work);
    for (auto& th : pool_threads) th.join();
    if (failure) std::rethrow_exception(failure);
}

double binomial_se(double p, std::size_t r) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(r));
}

// Per-step slack used by the "nonincreasing within two standard errors"
// checks: combined standard error of the adjacent estimates.
bool nonincreasing_within(const std::vector<double>& values, const std::vector<double>& ses) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        double slack = 2.0 * std::sqrt(ses[i - 1] * ses[i - 1] + ses[i] * ses[i]);
        if (values[i] > values[i - 1] + slack) return false;
    }
    return true;
}

HermiteProfile build_profile(const ExperimentConfig& cfg) {
    HermiteProfile::Options opts;
    opts.delta = cfg.delta;
    opts.lambda_override = cfg.lambda_override;
    opts.rank.tol = cfg.rank_tol;
    return HermiteProfile::build(cfg.g, opts);
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> issues;
    if (n_ladder.empty()) issues.push_back("n_ladder: must be nonempty");
    for (std::size_t i = 1; i < n_ladder.size(); ++i) {
        if (n_ladder[i] <= n_ladder[i - 1]) {
            issues.push_back("n_ladder[" + std::to_string(i) + "]: ladder must be strictly increasing");
            break;
        }
    }
    for (std::size_t i = 0; i < n_ladder.size(); ++i) {
        if (n_ladder[i] == 0) issues.push_back("n_ladder[" + std::to_string(i) + "]: zero length");
    }
    if (replications == 0) issues.push_back("replications: must be positive");
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
        if (!(epsilon_grid[i] > 0.0)) {
            issues.push_back("epsilon_grid[" + std::to_string(i) + "]: must be positive");
        }
    }
    for (std::size_t i = 0; i < t_probes.size(); ++i) {
        if (t_probes[i] < 0.0 || t_probes[i] > 1.0) {
            issues.push_back("t_probes[" + std::to_string(i) + "]: must lie in [0, 1]");
        }
    }
    if (!(delta > 0.0)) issues.push_back("delta: must be positive");
    if (lambda_override && *lambda_override < 0.0) {
        issues.push_back("lambda: must be nonnegative");
    }
    if (!(mesh_step > 0.0)) issues.push_back("mesh_step: must be positive");
    if (!(tail_tol > 0.0)) issues.push_back("tail_tol: must be positive");
    return issues;
}

std::optional<std::string> hypothesis_violation(const ExperimentConfig& cfg, unsigned rank) {
    auto d = cfg.model.memory_exponent();
    if (!d) return std::nullopt;
    if (static_cast<double>(rank) * *d < 1.0) return std::nullopt;
    return "hypothesis violated: D >= 1/m (m = " + std::to_string(rank) +
           ", D = " + std::to_string(*d) + ")";
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& log_points) {
    SlopeFit fit;
    fit.points = log_points.size();
    if (log_points.size() < 3) return fit;
    std::vector<double> xs, ys;
    xs.reserve(log_points.size());
    ys.reserve(log_points.size());
    for (const auto& [x, y] : log_points) {
        xs.push_back(x);
        ys.push_back(y);
    }
    OlsFit ols = ols_fit(xs, ys);
    fit.ok = true;
    fit.slope = ols.slope;
    fit.intercept = ols.intercept;
    fit.se = ols.slope_se;
    fit.half_width_95 = student_t_975(ols.n - 2) * ols.slope_se;
    return fit;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_distance(std::vector<double> first, std::vector<double> second) {
    if (first.empty() || second.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    const double na = static_cast<double>(first.size());
    const double nb = static_cast<double>(second.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < first.size() || j < second.size()) {
        double v;
        if (j >= second.size() || (i < first.size() && first[i] <= second[j])) {
            v = first[i];
        } else {
            v = second[j];
        }
        while (i < first.size() && first[i] == v) ++i;
        while (j < second.size() && second[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

ReductionReport run_reduction_experiment(const ExperimentConfig& cfg) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw std::invalid_argument("config: " + issues.front());

    HermiteProfile profile = build_profile(cfg);
    if (auto violation = hypothesis_violation(cfg, profile.rank())) {
        throw HypothesisError(*violation);
    }
    const WeightFunction w = profile.weight();

    ReductionReport report;
    report.n_ladder = cfg.n_ladder;
    report.rank = profile.rank();
    report.lambda = profile.lambda();
    report.raw_mn.resize(cfg.n_ladder.size());

    for (std::size_t ladder = 0; ladder < cfg.n_ladder.size(); ++ladder) {
        const std::size_t n = cfg.n_ladder[ladder];
        const double d_n = normalization_dN(cfg.model, profile.rank(), n);
        report.d_n.push_back(d_n);

        // Fixed part of the evaluation grid: probes, a chaining grid of
        // moderate depth and the tail-adequate mesh; per-replication sample
        // points are merged on top.
        GridBuildOptions grid_opts;
        grid_opts.mesh_step = cfg.mesh_step;
        grid_opts.tail_tol = cfg.tail_tol;
        grid_opts.extra_x = cfg.x_probes;
        const unsigned chain_depth = 6;
        for (ChainSide side : {ChainSide::Positive, ChainSide::Negative}) {
            ChainGrid chain = build_chain_grid(profile, side, chain_depth, 256);
            for (double node : chain.levels[chain_depth]) grid_opts.extra_x.push_back(node);
        }
        GridSpec fixed = build_grid(profile, n, d_n, grid_opts);

        std::vector<double>& raw = report.raw_mn[ladder];
        raw.assign(cfg.replications, 0.0);
        parallel_replications(cfg.replications, cfg.workers, [&](std::size_t rep) {
            const std::uint64_t seed = mix_seed(mix_seed(cfg.master_seed, n), rep);
            GaussianPath path = generate_path(cfg.model, n, seed);
            SubordinatedSample y = subordinate(path, profile.g());
            std::vector<double> nodes = fixed.x_nodes;
            nodes.insert(nodes.end(), y.y.begin(), y.y.end());
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
            raw[rep] = reduction_statistic(y, path, profile, nodes, d_n, w).value;
        });
    }

    report.all_pass = true;
    for (double eps : cfg.epsilon_grid) {
        EpsilonDecay decay;
        decay.epsilon = eps;
        for (const auto& raw : report.raw_mn) {
            std::size_t count = 0;
            for (double m : raw) count += m > eps ? 1 : 0;
            decay.exceed_counts.push_back(count);
            double p = static_cast<double>(count) / static_cast<double>(cfg.replications);
            decay.p_hat.push_back(p);
            decay.se.push_back(binomial_se(p, cfg.replications));
        }
        decay.nonincreasing_within_2se = nonincreasing_within(decay.p_hat, decay.se);
        decay.all_zero = std::all_of(decay.exceed_counts.begin(), decay.exceed_counts.end(),
                                     [](std::size_t c) { return c == 0; });
        std::vector<std::pair<double, double>> log_points;
        for (std::size_t i = 0; i < decay.p_hat.size(); ++i) {
            if (decay.p_hat[i] > 0.0) {
                log_points.emplace_back(std::log(static_cast<double>(cfg.n_ladder[i])),
                                        std::log(decay.p_hat[i]));
            }
        }
        decay.slope = slope_fit(log_points);
        if (decay.all_zero) {
            report.notices.push_back("epsilon " + std::to_string(eps) +
                                     ": no exceedances at any N; decay consistent, slope undefined");
        } else if (!decay.slope.ok) {
            report.notices.push_back("epsilon " + std::to_string(eps) +
                                     ": fewer than three positive tail estimates; slope undefined");
        }
        // Weighted fit: var(log p_hat) = (1 - p) / (p R) by the delta method.
        if (log_points.size() >= 3) {
            double sw = 0.0, swx = 0.0, swy = 0.0;
            std::vector<double> weights;
            for (const auto& [lx, ly] : log_points) {
                double p = std::exp(ly);
                double w = p * static_cast<double>(cfg.replications) / (1.0 - p);
                weights.push_back(w);
                sw += w;
                swx += w * lx;
                swy += w * ly;
            }
            double xbar = swx / sw, ybar = swy / sw;
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < log_points.size(); ++i) {
                double dx = log_points[i].first - xbar;
                sxx += weights[i] * dx * dx;
                sxy += weights[i] * dx * (log_points[i].second - ybar);
            }
            if (sxx > 0.0) {
                decay.wls_defined = true;
                decay.wls_slope = sxy / sxx;
                decay.wls_se = std::sqrt(1.0 / sxx);
                decay.slope_negative_95 = decay.wls_slope + 1.645 * decay.wls_se < 0.0;
            }
        }
        // The pass flag is the monotone-decay check; slopes are reported
        // alongside without a verdict of their own.
        report.all_pass = report.all_pass && decay.nonincreasing_within_2se;
        report.decay.push_back(std::move(decay));
    }
    if (!cfg.keep_raw) report.raw_mn.clear();
    return report;
}

MomentReport run_moment_check(const ExperimentConfig& cfg, double n_fraction,
                              const std::vector<std::pair<double, double>>& x_pairs) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw std::invalid_argument("config: " + issues.front());
    if (!(n_fraction > 0.0) || n_fraction > 1.0) {
        throw std::invalid_argument("run_moment_check: n_fraction must lie in (0, 1]");
    }

    HermiteProfile profile = build_profile(cfg);
    const unsigned m = profile.rank();
    const double inv_mfact = 1.0 / factorial(m);

    MomentReport report;
    report.n_ladder = cfg.n_ladder;
    report.n_fraction = n_fraction;

    struct PairConstants {
        double x, y, f_xy, delta_jm;
        bool skipped;
    };
    std::vector<PairConstants> consts;
    for (const auto& [x, y] : x_pairs) {
        if (!(x < y)) {
            if (x == y) {
                // S_N(n, x, x) = 0 identically and F(x, x) = 0: nothing to
                // estimate, recorded as a skip.
                report.notices.push_back("pair (" + std::to_string(x) + ", " +
                                         std::to_string(y) +
                                         "): x = y, the increment vanishes identically");
                consts.push_back({x, y, 0.0, 0.0, true});
                continue;
            }
            throw std::invalid_argument("run_moment_check: pairs need x < y");
        }
        PairConstants pc;
        pc.x = x;
        pc.y = y;
        pc.f_xy = profile.cdf(y) - profile.cdf(x);
        pc.delta_jm = profile.coefficient(m, y) - profile.coefficient(m, x);
        pc.skipped = pc.f_xy == 0.0;
        if (pc.skipped) {
            report.notices.push_back("pair (" + std::to_string(x) + ", " + std::to_string(y) +
                                     "): F(x, y) = 0, skipped");
        }
        consts.push_back(pc);
    }

    // raw[ladder][pair][rep]
    std::vector<std::vector<std::vector<double>>> raw(cfg.n_ladder.size());
    for (std::size_t ladder = 0; ladder < cfg.n_ladder.size(); ++ladder) {
        const std::size_t n_total = cfg.n_ladder[ladder];
        const std::size_t n_used = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(n_fraction * static_cast<double>(n_total))));
        report.n_used.push_back(n_used);
        const double d_n = normalization_dN(cfg.model, m, n_total);

        raw[ladder].assign(consts.size(), std::vector<double>(cfg.replications, 0.0));
        parallel_replications(cfg.replications, cfg.workers, [&](std::size_t rep) {
            const std::uint64_t seed = mix_seed(mix_seed(cfg.master_seed, n_total), rep);
            GaussianPath path = generate_path(cfg.model, n_total, seed);
            SubordinatedSample ys = subordinate(path, profile.g());
            double hermite_sum = 0.0;
            for (std::size_t j = 0; j < n_used; ++j) {
                hermite_sum += hermite_eval(m, path.values[j]);
            }
            for (std::size_t p = 0; p < consts.size(); ++p) {
                const auto& pc = consts[p];
                if (pc.skipped) continue;
                std::size_t count = 0;
                for (std::size_t j = 0; j < n_used; ++j) {
                    count += (pc.x < ys.y[j] && ys.y[j] <= pc.y) ? 1 : 0;
                }
                raw[ladder][p][rep] =
                    (static_cast<double>(count) - static_cast<double>(n_used) * pc.f_xy -
                     pc.delta_jm * inv_mfact * hermite_sum) /
                    d_n;
            }
        });
    }

    report.all_pass = true;
    for (std::size_t p = 0; p < consts.size(); ++p) {
        MomentPairResult res;
        res.x = consts[p].x;
        res.y = consts[p].y;
        res.f_xy = consts[p].f_xy;
        res.skipped = consts[p].skipped;
        if (!res.skipped) {
            for (std::size_t ladder = 0; ladder < cfg.n_ladder.size(); ++ladder) {
                const auto& values = raw[ladder][p];
                double mean_sq = 0.0;
                for (double v : values) mean_sq += v * v;
                mean_sq /= static_cast<double>(values.size());
                double var_sq = 0.0;
                for (double v : values) {
                    double centered = v * v - mean_sq;
                    var_sq += centered * centered;
                }
                var_sq /= static_cast<double>(values.size());
                double se = std::sqrt(var_sq / static_cast<double>(values.size()));
                double denom = (static_cast<double>(report.n_used[ladder]) /
                                static_cast<double>(cfg.n_ladder[ladder])) *
                               res.f_xy * (1.0 - res.f_xy);
                res.second_moment.push_back(mean_sq);
                res.se.push_back(se);
                res.ratio.push_back(mean_sq / denom);
                res.ratio_se.push_back(se / denom);
            }
            res.decreasing_within_2se = nonincreasing_within(res.ratio, res.ratio_se);
            report.all_pass = report.all_pass && res.decreasing_within_2se;
        }
        report.pairs.push_back(std::move(res));
    }
    return report;
}

LimitReport run_limit_experiment(const ExperimentConfig& cfg) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw std::invalid_argument("config: " + issues.front());

    HermiteProfile profile = build_profile(cfg);
    const unsigned m = profile.rank();
    if (auto violation = hypothesis_violation(cfg, m)) throw HypothesisError(*violation);
    auto memory = cfg.model.memory_exponent();
    if (!memory) {
        throw HypothesisError(
            "model has no memory exponent; the Hermite-process reference needs D");
    }
    const double d_exponent = *memory;
    const double inv_mfact = 1.0 / factorial(m);

    LimitReport report;
    report.rank = m;
    report.n_ladder = cfg.n_ladder;
    // 95% null quantile of the KS statistic: one-sample for the rank-1
    // normal reference, two-sample (equal sizes) for the surrogate.
    const double r_count = static_cast<double>(cfg.replications);
    report.null_band = m == 1 ? 1.36 / std::sqrt(r_count) : 1.36 * std::sqrt(2.0 / r_count);
    report.threshold = report.null_band + cfg.ks_bias_margin;
    report.flags_suppressed = cfg.replications < 100;
    if (report.flags_suppressed) {
        report.notices.push_back("R < 100: distributional flags suppressed");
    }

    // Probe bookkeeping: skip degenerate entries up front.
    for (double x : cfg.x_probes) {
        for (double t : cfg.t_probes) {
            LimitProbeResult probe;
            probe.x = x;
            probe.t = t;
            const double jm = profile.coefficient(m, x);
            if (t == 0.0) {
                probe.skipped = true;
                probe.skip_reason = "t = 0: degenerate point mass";
            } else if (std::fabs(jm) <= cfg.rank_tol) {
                probe.skipped = true;
                probe.skip_reason = "J_m(x) below rank tolerance: degenerate limit";
            }
            probe.scale_ref = jm * inv_mfact;
            probe.sigma_ref = std::fabs(jm) * std::pow(t, 1.0 - 0.5 * d_exponent);
            if (probe.skipped) report.notices.push_back(
                "probe (x=" + std::to_string(x) + ", t=" + std::to_string(t) + ") skipped: " +
                probe.skip_reason);
            report.probes.push_back(std::move(probe));
        }
    }

    // Replication values of d_N^{-1} R_N(x, t) per ladder length and probe.
    // values[ladder][probe][rep]
    std::vector<std::vector<std::vector<double>>> values(cfg.n_ladder.size());
    for (std::size_t ladder = 0; ladder < cfg.n_ladder.size(); ++ladder) {
        const std::size_t n = cfg.n_ladder[ladder];
        const double d_n = normalization_dN(cfg.model, m, n);
        report.d_n.push_back(d_n);
        values[ladder].assign(report.probes.size(),
                              std::vector<double>(cfg.replications, 0.0));
        parallel_replications(cfg.replications, cfg.workers, [&](std::size_t rep) {
            const std::uint64_t seed = mix_seed(mix_seed(cfg.master_seed, n), rep);
            GaussianPath path = generate_path(cfg.model, n, seed);
            SubordinatedSample ys = subordinate(path, profile.g());
            for (std::size_t p = 0; p < report.probes.size(); ++p) {
                const auto& probe = report.probes[p];
                if (probe.skipped) continue;
                const std::size_t upto = static_cast<std::size_t>(
                    std::floor(static_cast<double>(n) * probe.t));
                std::size_t count = 0;
                for (std::size_t j = 0; j < upto; ++j) count += ys.y[j] <= probe.x ? 1 : 0;
                const double f = profile.cdf(probe.x);
                values[ladder][p][rep] =
                    (static_cast<double>(count) - static_cast<double>(upto) * f) / d_n;
            }
        });
    }

    // Reference: exact normal law for rank 1, large-length partial-sum
    // surrogate for rank >= 2.
    std::vector<std::vector<double>> surrogate_per_t;  // [t index][rep]
    if (m >= 2) {
        report.surrogate_length = 4 * cfg.n_ladder.back();
        const std::size_t big = report.surrogate_length;
        const double d_big = normalization_dN(cfg.model, m, big);
        surrogate_per_t.assign(cfg.t_probes.size(),
                               std::vector<double>(cfg.replications, 0.0));
        parallel_replications(cfg.replications, cfg.workers, [&](std::size_t rep) {
            const std::uint64_t seed = mix_seed(mix_seed(cfg.master_seed, big), rep);
            GaussianPath path = generate_path(cfg.model, big, seed);
            // One pass of prefix sums of H_m covers every t probe.
            std::vector<std::size_t> cutoffs(cfg.t_probes.size());
            for (std::size_t ti = 0; ti < cfg.t_probes.size(); ++ti) {
                cutoffs[ti] = static_cast<std::size_t>(
                    std::floor(static_cast<double>(big) * cfg.t_probes[ti]));
            }
            std::vector<std::size_t> order(cfg.t_probes.size());
            for (std::size_t ti = 0; ti < order.size(); ++ti) order[ti] = ti;
            std::sort(order.begin(), order.end(),
                      [&cutoffs](std::size_t a, std::size_t b) { return cutoffs[a] < cutoffs[b]; });
            double running = 0.0;
            std::size_t j = 0;
            for (std::size_t ti : order) {
                for (; j < cutoffs[ti]; ++j) running += hermite_eval(m, path.values[j]);
                surrogate_per_t[ti][rep] = running / d_big;
            }
        });
    }

    report.all_pass = true;
    for (std::size_t p = 0; p < report.probes.size(); ++p) {
        LimitProbeResult& probe = report.probes[p];
        if (probe.skipped) continue;
        const std::size_t t_index =
            static_cast<std::size_t>(std::find(cfg.t_probes.begin(), cfg.t_probes.end(),
                                               probe.t) -
                                     cfg.t_probes.begin());
        for (std::size_t ladder = 0; ladder < cfg.n_ladder.size(); ++ladder) {
            if (m == 1) {
                const double sigma = probe.sigma_ref;
                probe.ks.push_back(ks_distance(values[ladder][p], [sigma](double v) {
                    return normal_cdf(v / sigma);
                }));
            } else {
                std::vector<double> reference = surrogate_per_t[t_index];
                for (double& v : reference) v *= probe.scale_ref;
                probe.ks.push_back(ks_distance(values[ladder][p], reference));
            }
        }
        probe.final_below_threshold = probe.ks.back() < report.threshold;
        probe.decreasing = probe.ks.back() <= std::max(probe.ks.front(), report.null_band);
        if (!report.flags_suppressed) {
            report.all_pass =
                report.all_pass && probe.final_below_threshold && probe.decreasing;
        }
    }
    if (cfg.keep_raw) report.raw_values = std::move(values);
    return report;
}

}  // namespace lrdemp
