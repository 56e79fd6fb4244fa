// Replication harness turning the limit statements into finite-sample
// checks: reduction-principle decay, second-moment bounds and convergence of
// the normalized sequential empirical process to its Hermite limit.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lrdemp/empirical.hpp"
#include "lrdemp/profile.hpp"

namespace lrdemp {

class HypothesisError : public std::runtime_error {
  public:
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
    CovarianceModel model = CovarianceModel::fgn(0.75);
    SubordinationFunction g = SubordinationFunction::identity();
    double delta = 3.0;
    std::optional<double> lambda_override;  // default lambda = delta / 3
    std::vector<std::size_t> n_ladder = {256, 512, 1024, 2048, 4096, 8192};
    std::size_t replications = 500;
    std::vector<double> epsilon_grid = {0.25, 0.5, 1.0};
    std::vector<double> x_probes = {-1.0, 0.0, 1.0};
    std::vector<double> t_probes = {0.5, 1.0};
    std::uint64_t master_seed = 42;
    unsigned workers = 0;  // 0 = hardware concurrency
    bool keep_raw = false;
    double mesh_step = 0.01;
    double tail_tol = 1e-8;
    double ks_bias_margin = 0.04;  // added to the 1.36/sqrt(R) null quantile
    double rank_tol = 1e-6;

    // Structural validation; returns one message per invalid field.
    std::vector<std::string> validate() const;
};

// Long-range dependence hypothesis m * D < 1 for models with a memory
// exponent; returns a message when violated, nothing when D is not
// identifiable.
std::optional<std::string> hypothesis_violation(const ExperimentConfig& cfg, unsigned rank);

struct SlopeFit {
    bool ok = false;  // at least three positive points
    double slope = 0.0;
    double intercept = 0.0;
    double se = 0.0;
    double half_width_95 = 0.0;
    std::size_t points = 0;
};

// OLS on (log N, log p) pairs; callers pass the logs directly.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& log_points);

// One-sample Kolmogorov-Smirnov distance against a reference cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
// Two-sample version, tie-aware.
double ks_distance(std::vector<double> first, std::vector<double> second);

struct EpsilonDecay {
    double epsilon = 0.0;
    std::vector<std::size_t> exceed_counts;  // per ladder N
    std::vector<double> p_hat;
    std::vector<double> se;
    bool nonincreasing_within_2se = false;
    bool all_zero = false;   // decay consistent, slope undefined
    SlopeFit slope;          // ordinary least squares on (log N, log p_hat)
    // Weighted fit with the known binomial variances of log p_hat; the
    // slope is reported, not judged: the pass flag rests on monotone decay.
    bool wls_defined = false;
    double wls_slope = 0.0;
    double wls_se = 0.0;
    bool slope_negative_95 = false;  // one-sided bound from the weighted fit
};

struct ReductionReport {
    std::vector<std::size_t> n_ladder;
    std::vector<double> d_n;
    std::vector<EpsilonDecay> decay;
    std::vector<std::vector<double>> raw_mn;  // [ladder][rep] when keep_raw
    std::vector<std::string> notices;
    unsigned rank = 0;
    double lambda = 0.0;
    bool all_pass = false;
};

ReductionReport run_reduction_experiment(const ExperimentConfig& cfg);

struct MomentPairResult {
    double x = 0.0;
    double y = 0.0;
    double f_xy = 0.0;
    bool skipped = false;
    std::vector<double> second_moment;  // per ladder N
    std::vector<double> se;
    std::vector<double> ratio;  // to (n/N) F(x,y)(1 - F(x,y))
    std::vector<double> ratio_se;
    bool decreasing_within_2se = false;
};

struct MomentReport {
    std::vector<std::size_t> n_ladder;
    std::vector<std::size_t> n_used;  // floor(n_fraction * N)
    double n_fraction = 1.0;
    std::vector<MomentPairResult> pairs;
    std::vector<std::string> notices;
    bool all_pass = false;
};

MomentReport run_moment_check(const ExperimentConfig& cfg, double n_fraction,
                              const std::vector<std::pair<double, double>>& x_pairs);

struct LimitProbeResult {
    double x = 0.0;
    double t = 0.0;
    bool skipped = false;
    std::string skip_reason;
    double sigma_ref = 0.0;  // rank-1 reference standard deviation
    double scale_ref = 0.0;  // J_m(x)/m! applied to the surrogate
    std::vector<double> ks;  // per ladder N
    bool final_below_threshold = false;
    bool decreasing = false;  // ks_last <= max(ks_first, null band)
};

struct LimitReport {
    unsigned rank = 0;
    std::vector<std::size_t> n_ladder;
    std::vector<double> d_n;
    std::size_t surrogate_length = 0;  // 0 for the rank-1 normal reference
    double threshold = 0.0;
    double null_band = 0.0;
    bool flags_suppressed = false;  // replications < 100
    std::vector<LimitProbeResult> probes;
    std::vector<std::string> notices;
    bool all_pass = false;
    // raw_values[ladder][probe][rep] when keep_raw is set
    std::vector<std::vector<std::vector<double>>> raw_values;
};

LimitReport run_limit_experiment(const ExperimentConfig& cfg);

}  // namespace lrdemp
