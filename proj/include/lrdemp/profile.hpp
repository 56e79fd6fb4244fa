// Hermite coefficients J_q(x), Hermite rank, marginal F, majorant Lambda,
// normalization d_N, moment condition and the weighted-coefficient bound.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lrdemp/covariance.hpp"
#include "lrdemp/subordination.hpp"

namespace lrdemp {

// w(x) = (1 + |x|)^lambda, even, nondecreasing on [0, inf).
struct WeightFunction {
    double lambda = 0.0;

    double operator()(double x) const;
};

// J_q(x) = integral of H_q phi over {G <= x}, exact per sublevel interval via
// the antiderivative H_{q-1} phi.
double hermite_coefficient(const SubordinationFunction& g, unsigned q, double x);

// F(x) = normal measure of {G <= x}.
double marginal_cdf(const SubordinationFunction& g, double x);

// Lambda(x) = F(x) + integral of |H_m| phi / m! over {G <= x}; the sublevel
// intervals are split at the roots of H_m so each piece integrates exactly.
double lambda_majorant(const SubordinationFunction& g, unsigned rank, double x);

struct RankOptions {
    double grid_lo = -8.0;
    double grid_hi = 8.0;
    double grid_step = 0.05;
    double tol = 1e-6;
    unsigned q_max = 8;
};

class RankUndetectedError : public std::runtime_error {
  public:
    explicit RankUndetectedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Smallest q >= 1 with sup over the grid of |J_q| above tol; throws
// RankUndetectedError when nothing clears tol up to q_max.
unsigned hermite_rank(const SubordinationFunction& g, const RankOptions& opts = {});

// d_N = sqrt(m! * sum_{|i|<N} (N - |i|) r(i)^m), the exact standard deviation
// of sum_{j<=N} H_m(X_j).
double normalization_dN(const CovarianceModel& model, unsigned rank, std::size_t n);

struct MomentEstimate {
    double value = 0.0;          // E |G(Z)|^delta over [-12, 12]
    double tail_estimate = 0.0;  // integrand mass proxy at the cut points
    bool tail_risk = false;      // decay at the cut slower than the tolerance implies
};

MomentEstimate moment_estimate(const SubordinationFunction& g, double delta);

struct WeightedSupReport {
    double value = 0.0;
    double arg_max = 0.0;
    double radius = 0.0;     // grid radius at which the running sup stabilized
    bool stabilized = false; // false means still moving at radius 1e6
};

// sup over expanding symmetric grids of |w(x) J_q(x)|; the radius doubles
// until the sup changes by less than 1e-10.
WeightedSupReport weighted_coefficient_sup(const SubordinationFunction& g, unsigned q,
                                           double lambda, double initial_radius = 8.0,
                                           double step = 0.05);

// Immutable bundle used by the empirical-process and montecarlo layers:
// the map G, its class rank m, delta/lambda and cached evaluators.
class HermiteProfile {
  public:
    struct Options {
        RankOptions rank;
        double delta = 3.0;
        std::optional<double> lambda_override;  // default lambda = delta / 3
    };

    static HermiteProfile build(SubordinationFunction g, const Options& opts);
    static HermiteProfile build(SubordinationFunction g) { return build(std::move(g), Options{}); }

    const SubordinationFunction& g() const { return g_; }
    unsigned rank() const { return rank_; }
    double delta() const { return delta_; }
    double lambda() const { return lambda_; }
    WeightFunction weight() const { return WeightFunction{lambda_}; }

    double coefficient(unsigned q, double x) const { return hermite_coefficient(g_, q, x); }
    double cdf(double x) const { return marginal_cdf(g_, x); }
    // Same value as lambda_majorant(g, rank, x) with the H_rank roots cached.
    double majorant(double x) const;

    // First q <= q_max with |J_q(x)| > tol at this particular x (the
    // pointwise rank); 0 when none clears the tolerance.
    unsigned rank_at(double x, double tol = 1e-6, unsigned q_max = 8) const;

  private:
    HermiteProfile(SubordinationFunction g, unsigned rank, double delta, double lambda);

    SubordinationFunction g_;
    unsigned rank_;
    double delta_;
    double lambda_;
    std::vector<double> rank_roots_;  // roots of H_rank, cached for Lambda
    double rank_factorial_ = 1.0;
};

}  // namespace lrdemp
