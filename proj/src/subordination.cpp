#include "lrdemp/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lrdemp/hermite.hpp"

namespace lrdemp {

namespace {

constexpr double kRootTol = 1e-12;

// Tightens a sign-change bracket of a continuous function to kRootTol.
double refine_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= kRootTol * (1.0 + std::fabs(mid))) break;
        double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Monomial expansion of G = sum c_q H_q by the recurrence on coefficient
// vectors; done once at construction.
std::vector<double> hermite_to_monomial(const std::vector<double>& hermite_coeffs) {
    std::size_t degree = hermite_coeffs.size() - 1;
    while (degree > 0 && hermite_coeffs[degree] == 0.0) --degree;
    std::vector<std::vector<double>> h(degree + 1);
    h[0] = {1.0};
    if (degree >= 1) h[1] = {0.0, 1.0};
    for (std::size_t q = 1; q < degree; ++q) {
        std::vector<double> next(q + 2, 0.0);
        for (std::size_t i = 0; i <= q; ++i) next[i + 1] += h[q][i];
        for (std::size_t i = 0; i < q; ++i) next[i] -= static_cast<double>(q) * h[q - 1][i];
        h[q + 1] = std::move(next);
    }
    std::vector<double> mono(degree + 1, 0.0);
    for (std::size_t q = 0; q <= degree; ++q) {
        for (std::size_t i = 0; i < h[q].size(); ++i) mono[i] += hermite_coeffs[q] * h[q][i];
    }
    return mono;
}

// Sublevel set of a polynomial: scan [-B, B] for sign changes of G - x
// (B from the Cauchy bound on monomial coefficients) and assemble the <= x
// regions, extending to +/-inf by the leading behaviour.
std::vector<RealInterval> polynomial_sublevel(const std::vector<double>& monomial, double x) {
    std::vector<double> mono = monomial;
    mono[0] -= x;

    std::size_t deg = mono.size() - 1;
    while (deg > 0 && mono[deg] == 0.0) --deg;
    if (deg == 0) {
        if (mono[0] <= 0.0) return {{kNegInf, kPosInf}};
        return {};
    }
    const double lead = mono[deg];
    double cauchy = 0.0;
    for (std::size_t i = 0; i < deg; ++i) cauchy = std::max(cauchy, std::fabs(mono[i] / lead));
    const double bound = 1.0 + cauchy;

    auto g_minus_x = [&mono, deg](double s) {
        double v = mono[deg];
        for (std::size_t i = deg; i-- > 0;) v = v * s + mono[i];
        return v;
    };

    // Sign scan; resolution scales with the degree so closely spaced roots
    // are separated.
    const int scan = 2000 * static_cast<int>(deg);
    std::vector<double> roots;
    double prev_s = -bound;
    double prev_v = g_minus_x(prev_s);
    for (int i = 1; i <= scan; ++i) {
        double s = -bound + 2.0 * bound * static_cast<double>(i) / scan;
        double v = g_minus_x(s);
        if ((prev_v <= 0.0) != (v <= 0.0)) {
            roots.push_back(refine_root(g_minus_x, prev_s, s));
        }
        prev_s = s;
        prev_v = v;
    }

    // Walk the sign pattern: below-level regions alternate between roots.
    std::vector<RealInterval> intervals;
    bool below = g_minus_x(-bound) <= 0.0;  // matches sign at -inf (even deg) or -lead (odd)
    double left = kNegInf;
    for (double r : roots) {
        if (below) {
            intervals.push_back({left, r});
        } else {
            left = r;
        }
        below = !below;
    }
    if (below) intervals.push_back({left, kPosInf});
    return intervals;
}

}  // namespace

SubordinationFunction SubordinationFunction::identity() {
    SubordinationFunction g;
    g.kind_ = SubordinationKind::Identity;
    g.name_ = "identity";
    return g;
}

SubordinationFunction SubordinationFunction::square() {
    SubordinationFunction g;
    g.kind_ = SubordinationKind::Square;
    g.name_ = "square";
    return g;
}

SubordinationFunction SubordinationFunction::cube() {
    SubordinationFunction g;
    g.kind_ = SubordinationKind::Cube;
    g.name_ = "cube";
    return g;
}

SubordinationFunction SubordinationFunction::hermite_combo(std::vector<double> coefficients) {
    if (coefficients.empty()) {
        throw std::invalid_argument("hermite_combo: need at least one coefficient");
    }
    bool any = false;
    for (std::size_t q = 1; q < coefficients.size(); ++q) any |= coefficients[q] != 0.0;
    if (!any) throw std::invalid_argument("hermite_combo: map is constant");
    SubordinationFunction g;
    g.kind_ = SubordinationKind::HermiteCombo;
    g.coeffs_ = std::move(coefficients);
    g.monomial_ = hermite_to_monomial(g.coeffs_);
    std::ostringstream name;
    name << "hermite:";
    for (std::size_t q = 0; q < g.coeffs_.size(); ++q) {
        if (q) name << ",";
        name << g.coeffs_[q];
    }
    g.name_ = name.str();
    return g;
}

SubordinationFunction SubordinationFunction::custom_monotone(std::function<double(double)> fn,
                                                             bool increasing, double bracket_lo,
                                                             double bracket_hi) {
    if (!fn) throw std::invalid_argument("custom_monotone: empty callable");
    if (!(bracket_lo < bracket_hi)) {
        throw std::invalid_argument("custom_monotone: bracket_lo must be below bracket_hi");
    }
    SubordinationFunction g;
    g.kind_ = SubordinationKind::CustomMonotone;
    g.fn_ = std::move(fn);
    g.increasing_ = increasing;
    g.bracket_lo_ = bracket_lo;
    g.bracket_hi_ = bracket_hi;
    g.name_ = increasing ? "custom-increasing" : "custom-decreasing";
    return g;
}

double SubordinationFunction::operator()(double s) const {
    switch (kind_) {
        case SubordinationKind::Identity:
            return s;
        case SubordinationKind::Square:
            return s * s;
        case SubordinationKind::Cube:
            return s * s * s;
        case SubordinationKind::HermiteCombo: {
            double v = 0.0;
            double prev = 1.0, cur = s;
            v += coeffs_[0];
            if (coeffs_.size() > 1) v += coeffs_[1] * s;
            for (std::size_t q = 2; q < coeffs_.size(); ++q) {
                double next = s * cur - static_cast<double>(q - 1) * prev;
                prev = cur;
                cur = next;
                v += coeffs_[q] * cur;
            }
            return v;
        }
        case SubordinationKind::CustomMonotone:
            return fn_(s);
    }
    return 0.0;
}

std::vector<RealInterval> SubordinationFunction::sublevel(double x) const {
    switch (kind_) {
        case SubordinationKind::Identity:
            return {{kNegInf, x}};
        case SubordinationKind::Square: {
            if (x < 0.0) return {};
            double r = std::sqrt(x);
            return {{-r, r}};
        }
        case SubordinationKind::Cube:
            return {{kNegInf, std::cbrt(x)}};
        case SubordinationKind::HermiteCombo:
            return polynomial_sublevel(monomial_, x);
        case SubordinationKind::CustomMonotone: {
            // h is nondecreasing in s and crosses zero where G(s) = x.
            auto h = [this, x](double s) {
                return increasing_ ? fn_(s) - x : x - fn_(s);
            };
            // Expand the user bracket geometrically until it straddles zero.
            double a = bracket_lo_, b = bracket_hi_;
            double step = b - a;
            double va = h(a), vb = h(b);
            while (va > 0.0 && a > -1e12) {
                b = a;
                vb = va;
                a -= step;
                step *= 2.0;
                va = h(a);
            }
            step = b - a;
            while (vb < 0.0 && b < 1e12) {
                a = b;
                va = vb;
                b += step;
                step *= 2.0;
                vb = h(b);
            }
            if (va > 0.0) {
                // h > 0 on the whole reachable range: the crossing sits below
                // -1e12, which carries no normal mass either way.
                return increasing_ ? std::vector<RealInterval>{{kNegInf, a}}
                                   : std::vector<RealInterval>{{a, kPosInf}};
            }
            if (vb < 0.0) {
                // h < 0 on the whole reachable range: crossing above +1e12.
                return increasing_ ? std::vector<RealInterval>{{kNegInf, b}}
                                   : std::vector<RealInterval>{{b, kPosInf}};
            }
            double root = refine_root(h, a, b);
            if (increasing_) return {{kNegInf, root}};
            return {{root, kPosInf}};
        }
    }
    return {};
}

SubordinatedSample subordinate(const GaussianPath& path, const SubordinationFunction& g) {
    SubordinatedSample s;
    s.y.resize(path.size());
    for (std::size_t j = 0; j < path.size(); ++j) s.y[j] = g(path.values[j]);
    s.g_id = g.name();
    s.source_seed = path.seed;
    return s;
}

}  // namespace lrdemp
