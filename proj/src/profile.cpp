#include "lrdemp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrdemp/hermite.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp {

namespace {

// Antiderivative identity: integral of H_q phi over [a, b] equals
// H_{q-1}(a) phi(a) - H_{q-1}(b) phi(b); phi vanishes at infinite endpoints.
double hermite_phi_mass(unsigned q, double a, double b) {
    double lo = std::isinf(a) ? 0.0 : hermite_eval(q - 1, a) * normal_pdf(a);
    double hi = std::isinf(b) ? 0.0 : hermite_eval(q - 1, b) * normal_pdf(b);
    return lo - hi;
}

double normal_mass(double a, double b) {
    double lo = std::isinf(a) ? 0.0 : normal_cdf(a);
    double hi = std::isinf(b) ? 1.0 : normal_cdf(b);
    return hi - lo;
}

}  // namespace

double WeightFunction::operator()(double x) const {
    if (lambda == 0.0) return 1.0;
    return std::pow(1.0 + std::fabs(x), lambda);
}

double hermite_coefficient(const SubordinationFunction& g, unsigned q, double x) {
    const auto intervals = g.sublevel(x);
    if (q == 0) {
        double f = 0.0;
        for (const auto& iv : intervals) f += normal_mass(iv.lo, iv.hi);
        return f;
    }
    double j = 0.0;
    for (const auto& iv : intervals) j += hermite_phi_mass(q, iv.lo, iv.hi);
    return j;
}

double marginal_cdf(const SubordinationFunction& g, double x) {
    double f = 0.0;
    for (const auto& iv : g.sublevel(x)) f += normal_mass(iv.lo, iv.hi);
    return f;
}

namespace {

double majorant_with_roots(const SubordinationFunction& g, unsigned rank,
                           const std::vector<double>& roots, double m_fact, double x) {
    const auto intervals = g.sublevel(x);
    if (intervals.empty()) return 0.0;
    double total = 0.0;
    for (const auto& iv : intervals) {
        total += normal_mass(iv.lo, iv.hi);
        // |H_m| integrates piecewise between consecutive sign changes.
        double piece_lo = iv.lo;
        for (double r : roots) {
            if (r <= piece_lo || !(r < iv.hi)) continue;
            total += std::fabs(hermite_phi_mass(rank, piece_lo, r)) / m_fact;
            piece_lo = r;
        }
        total += std::fabs(hermite_phi_mass(rank, piece_lo, iv.hi)) / m_fact;
    }
    return total;
}

}  // namespace

double lambda_majorant(const SubordinationFunction& g, unsigned rank, double x) {
    if (rank == 0) throw std::invalid_argument("lambda_majorant: rank must be >= 1");
    const std::vector<double> roots = hermite_roots(rank);
    double m_fact = 1.0;
    for (unsigned q = 2; q <= rank; ++q) m_fact *= static_cast<double>(q);
    return majorant_with_roots(g, rank, roots, m_fact, x);
}

unsigned hermite_rank(const SubordinationFunction& g, const RankOptions& opts) {
    if (!(opts.grid_lo < opts.grid_hi) || !(opts.grid_step > 0.0) || !(opts.tol > 0.0)) {
        throw std::invalid_argument("hermite_rank: malformed grid or tolerance");
    }
    std::vector<double> grid;
    for (double x = opts.grid_lo; x <= opts.grid_hi + 0.5 * opts.grid_step; x += opts.grid_step) {
        grid.push_back(x);
    }
    for (unsigned q = 1; q <= opts.q_max; ++q) {
        double sup = 0.0;
        for (double x : grid) sup = std::max(sup, std::fabs(hermite_coefficient(g, q, x)));
        if (sup > opts.tol) return q;
    }
    throw RankUndetectedError("hermite_rank: no coefficient above tolerance " +
                              std::to_string(opts.tol) + " for q <= " +
                              std::to_string(opts.q_max));
}

double normalization_dN(const CovarianceModel& model, unsigned rank, std::size_t n) {
    if (rank == 0) throw std::invalid_argument("normalization_dN: rank must be >= 1");
    if (n == 0) throw std::invalid_argument("normalization_dN: n must be positive");
    double m_fact = 1.0;
    for (unsigned q = 2; q <= rank; ++q) m_fact *= static_cast<double>(q);
    double var = static_cast<double>(n);  // i = 0 term, r(0) = 1
    for (std::size_t i = 1; i < n; ++i) {
        double rk = model.at(i);
        double rm = rk;
        for (unsigned q = 1; q < rank; ++q) rm *= rk;
        var += 2.0 * static_cast<double>(n - i) * rm;
    }
    return std::sqrt(m_fact * var);
}

MomentEstimate moment_estimate(const SubordinationFunction& g, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("moment_estimate: delta must be positive");
    constexpr double kCut = 12.0;
    auto integrand = [&g, delta](double s) {
        double v = std::pow(std::fabs(g(s)), delta) * normal_pdf(s);
        if (!std::isfinite(v)) {
            throw std::runtime_error("moment_estimate: non-finite integrand at s = " +
                                     std::to_string(s));
        }
        return v;
    };
    MomentEstimate est;
    est.value = adaptive_simpson(integrand, -kCut, kCut, 1e-12);
    const double edge = integrand(kCut) + integrand(-kCut);
    const double inner = integrand(kCut - 1.0) + integrand(-kCut + 1.0);
    est.tail_estimate = edge;
    // A genuinely integrable tail keeps shrinking towards the cut; flag when
    // the integrand fails to decay there or the edge mass is non-negligible.
    est.tail_risk = edge >= inner || edge > 1e-12 * std::max(est.value, 1.0);
    return est;
}

WeightedSupReport weighted_coefficient_sup(const SubordinationFunction& g, unsigned q,
                                           double lambda, double initial_radius, double step) {
    constexpr double kMaxRadius = 1e6;
    constexpr double kStabilityTol = 1e-10;
    WeightFunction w{lambda};

    WeightedSupReport rep;
    auto scan = [&](double lo, double hi, double h) {
        for (double x = lo; x <= hi + 0.5 * h; x += h) {
            double v = std::fabs(w(x) * hermite_coefficient(g, q, x));
            if (v > rep.value) {
                rep.value = v;
                rep.arg_max = x;
            }
        }
    };

    double radius = initial_radius;
    scan(-radius, radius, step);
    while (radius < kMaxRadius) {
        double prev = rep.value;
        double next_radius = 2.0 * radius;
        // New shells keep the relative node density of the base grid.
        double h = step * next_radius / initial_radius;
        scan(-next_radius, -radius, h);
        scan(radius, next_radius, h);
        radius = next_radius;
        if (std::fabs(rep.value - prev) < kStabilityTol) {
            rep.stabilized = true;
            break;
        }
    }
    rep.radius = radius;
    return rep;
}

HermiteProfile::HermiteProfile(SubordinationFunction g, unsigned rank, double delta,
                               double lambda)
    : g_(std::move(g)), rank_(rank), delta_(delta), lambda_(lambda) {
    rank_roots_ = hermite_roots(rank_);
    for (unsigned q = 2; q <= rank_; ++q) rank_factorial_ *= static_cast<double>(q);
}

double HermiteProfile::majorant(double x) const {
    return majorant_with_roots(g_, rank_, rank_roots_, rank_factorial_, x);
}

HermiteProfile HermiteProfile::build(SubordinationFunction g, const Options& opts) {
    unsigned rank = hermite_rank(g, opts.rank);
    double lambda = opts.lambda_override.value_or(opts.delta / 3.0);
    if (lambda < 0.0) throw std::invalid_argument("HermiteProfile: lambda must be >= 0");
    return HermiteProfile(std::move(g), rank, opts.delta, lambda);
}

unsigned HermiteProfile::rank_at(double x, double tol, unsigned q_max) const {
    for (unsigned q = 1; q <= q_max; ++q) {
        if (std::fabs(coefficient(q, x)) > tol) return q;
    }
    return 0;
}

}  // namespace lrdemp
