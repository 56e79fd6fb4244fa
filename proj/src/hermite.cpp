#include "lrdemp/hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "lrdemp/stats.hpp"

namespace lrdemp {

double hermite_eval(unsigned order, double x) {
    if (order == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (unsigned q = 1; q < order; ++q) {
        double next = x * cur - static_cast<double>(q) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

void hermite_eval_all(unsigned max_order, double x, std::vector<double>& out) {
    out.resize(max_order + 1);
    out[0] = 1.0;
    if (max_order == 0) return;
    out[1] = x;
    for (unsigned q = 1; q < max_order; ++q) {
        out[q + 1] = x * out[q] - static_cast<double>(q) * out[q - 1];
    }
}

std::vector<double> hermite_roots(unsigned order) {
    std::vector<double> roots;
    if (order == 0) return roots;
    const double bound = std::sqrt(4.0 * order + 2.0);
    // Scan for sign changes, then tighten each bracket.
    const int scan = 400 * static_cast<int>(order);
    auto f = [order](double x) { return hermite_eval(order, x); };
    double prev_x = -bound;
    double prev_f = f(prev_x);
    for (int i = 1; i <= scan; ++i) {
        double x = -bound + 2.0 * bound * static_cast<double>(i) / scan;
        double fx = f(x);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if (prev_f * fx < 0.0) {
            double lo = prev_x, hi = x;
            double flo = prev_f;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (hi - lo < 1e-14 * (1.0 + std::fabs(mid))) break;
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    if (roots.size() != order) {
        throw std::runtime_error("hermite_roots: root scan missed a sign change");
    }
    // Symmetrize: roots of H_q come in +/- pairs (0 is a root for odd q).
    for (std::size_t i = 0; i < roots.size() / 2; ++i) {
        double r = 0.5 * (roots[roots.size() - 1 - i] - roots[i]);
        roots[i] = -r;
        roots[roots.size() - 1 - i] = r;
    }
    if (order % 2 == 1) roots[order / 2] = 0.0;
    return roots;
}

QuadratureRule gauss_hermite_rule(unsigned n) {
    if (n == 0) throw std::invalid_argument("gauss_hermite_rule: n must be positive");
    QuadratureRule rule;
    rule.nodes = hermite_roots(n);
    rule.weights.resize(n);
    double fact = 1.0;
    for (unsigned q = 2; q <= n; ++q) fact *= static_cast<double>(q);
    for (unsigned i = 0; i < n; ++i) {
        double h = hermite_eval(n - 1, rule.nodes[i]);
        rule.weights[i] = fact / (static_cast<double>(n) * static_cast<double>(n) * h * h);
    }
    return rule;
}

}  // namespace lrdemp
