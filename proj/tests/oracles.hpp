// Test-side oracles, independent of the library implementation paths they
// check: quadrature-based Hermite coefficients over sign-scanned sublevel
// sets, brute-force normalizations, direct-enumeration empirical processes
// and a bisection normal quantile.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "lrdemp/stats.hpp"

namespace oracles {

// Monomial coefficients of the probabilists' Hermite polynomial H_q, built
// by the coefficient-vector recurrence (not the library's value recurrence).
inline std::vector<double> hermite_monomial(unsigned q) {
    std::vector<std::vector<double>> h(q + 1);
    h[0] = {1.0};
    if (q >= 1) h[1] = {0.0, 1.0};
    for (unsigned k = 1; k < q; ++k) {
        std::vector<double> next(k + 2, 0.0);
        for (unsigned i = 0; i <= k; ++i) next[i + 1] += h[k][i];
        for (unsigned i = 0; i < k; ++i) next[i] -= static_cast<double>(k) * h[k - 1][i];
        h[k + 1] = std::move(next);
    }
    return h[q];
}

inline long double horner(const std::vector<double>& coeffs, long double x) {
    long double v = 0.0L;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
    return v;
}

// Magnitude scale sum |c_i| |x|^i, the conditioning bound for relative
// comparisons near roots.
inline long double horner_scale(const std::vector<double>& coeffs, long double x) {
    long double v = 0.0L;
    long double ax = std::fabs((double)x);
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * ax + std::fabs(coeffs[i]);
    return v;
}

struct Interval {
    double lo, hi;
};

// Sublevel set {s in [-12, 12] : g(s) <= x} by dense sign scan plus
// bisection; deliberately ignorant of the library's interval solver.
inline std::vector<Interval> scan_sublevel(const std::function<double(double)>& g, double x,
                                           double lo = -12.0, double hi = 12.0,
                                           int scan = 120000) {
    auto below = [&](double s) { return g(s) <= x; };
    std::vector<Interval> out;
    double step = (hi - lo) / scan;
    bool inside = below(lo);
    double left = lo;
    double prev = lo;
    for (int i = 1; i <= scan; ++i) {
        double s = lo + i * step;
        bool b = below(s);
        if (b != inside) {
            // refine the crossing
            double a = prev, c = s;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (a + c);
                if (below(mid) == inside) {
                    a = mid;
                } else {
                    c = mid;
                }
            }
            double crossing = 0.5 * (a + c);
            if (inside) {
                out.push_back({left, crossing});
            } else {
                left = crossing;
            }
            inside = b;
        }
        prev = s;
    }
    if (inside) out.push_back({left, hi});
    return out;
}

// J_q(x) by adaptive quadrature of H_q phi over the scanned sublevel set.
inline double quadrature_Jq(const std::function<double(double)>& g, unsigned q, double x,
                            double tol = 1e-11) {
    const auto coeffs = hermite_monomial(q);
    auto integrand = [&coeffs](double s) {
        return static_cast<double>(horner(coeffs, s)) * lrdemp::normal_pdf(s);
    };
    double total = 0.0;
    for (const auto& iv : scan_sublevel(g, x)) {
        total += lrdemp::adaptive_simpson(integrand, iv.lo, iv.hi, tol);
    }
    return total;
}

// F(x) by quadrature of phi over the scanned sublevel set.
inline double quadrature_cdf(const std::function<double(double)>& g, double x) {
    double total = 0.0;
    for (const auto& iv : scan_sublevel(g, x)) {
        total += lrdemp::adaptive_simpson([](double s) { return lrdemp::normal_pdf(s); }, iv.lo,
                                          iv.hi, 1e-12);
    }
    return total;
}

// Lambda(x) by quadrature of (1 + |H_m|/m!) phi over the sublevel set.
inline double quadrature_majorant(const std::function<double(double)>& g, unsigned m, double x) {
    const auto coeffs = hermite_monomial(m);
    double m_fact = 1.0;
    for (unsigned k = 2; k <= m; ++k) m_fact *= k;
    auto integrand = [&coeffs, m_fact](double s) {
        return (1.0 + std::fabs(static_cast<double>(horner(coeffs, s))) / m_fact) *
               lrdemp::normal_pdf(s);
    };
    double total = 0.0;
    for (const auto& iv : scan_sublevel(g, x)) {
        total += lrdemp::adaptive_simpson(integrand, iv.lo, iv.hi, 1e-11);
    }
    return total;
}

// d_N by the explicit double sum m! sum_{j,k} r(j - k)^m.
inline double brute_force_dN(const std::function<double(std::size_t)>& r, unsigned m,
                             std::size_t n) {
    double m_fact = 1.0;
    for (unsigned k = 2; k <= m; ++k) m_fact *= k;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t lag = j > k ? j - k : k - j;
            double rv = r(lag);
            double rm = rv;
            for (unsigned p = 1; p < m; ++p) rm *= rv;
            sum += rm;
        }
    }
    return std::sqrt(m_fact * sum);
}

// Direct enumeration of R_N(x, t) / d_N straight from the definition.
inline double enumerate_RN(const std::vector<double>& y,
                           const std::function<double(double)>& cdf, double x, double t,
                           double d_n) {
    std::size_t upto = static_cast<std::size_t>(
        std::floor(static_cast<double>(y.size()) * t));
    double sum = 0.0;
    for (std::size_t j = 0; j < upto; ++j) sum += (y[j] <= x ? 1.0 : 0.0) - cdf(x);
    return sum / d_n;
}

// Direct enumeration of S_N(n, x) / d_N from the definition.
inline double enumerate_SN(const std::vector<double>& y, const std::vector<double>& x_path,
                           const std::function<double(double)>& cdf,
                           const std::function<double(double)>& jm, unsigned m,
                           const std::function<double(double)>& hermite_m, std::size_t n,
                           double x, double d_n) {
    double m_fact = 1.0;
    for (unsigned k = 2; k <= m; ++k) m_fact *= k;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sum += (y[j] <= x ? 1.0 : 0.0) - cdf(x) - jm(x) / m_fact * hermite_m(x_path[j]);
    }
    return sum / d_n;
}

// Standard normal quantile by bisection on the distribution function.
inline double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (lrdemp::normal_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Fixed-step composite Simpson used by the orthogonality identity check.
inline double simpson_fixed(const std::function<double(double)>& f, double a, double b,
                            std::size_t intervals) {
    if (intervals % 2 == 1) ++intervals;
    double h = (b - a) / static_cast<double>(intervals);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i) {
        sum += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

}  // namespace oracles
