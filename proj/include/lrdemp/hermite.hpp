// Probabilists' Hermite polynomials and the Gauss-Hermite rule for the
// standard normal weight.
#pragma once

#include <cstddef>
#include <vector>

namespace lrdemp {

// H_q(x) by the three-term recurrence H_{q+1} = x H_q - q H_{q-1},
// with H_0 = 1, H_1 = x.
double hermite_eval(unsigned order, double x);

// Fills out[0..max_order] with H_0(x)..H_max(x) in one recurrence pass.
void hermite_eval_all(unsigned max_order, double x, std::vector<double>& out);

// Real roots of H_order, ascending. Bracketed bisection on sign changes;
// every root lies inside |x| <= sqrt(4*order + 2).
std::vector<double> hermite_roots(unsigned order);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // sums to 1, normal weight absorbed
};

// n-point Gauss-Hermite rule against the standard normal density:
// sum_i w_i f(x_i) integrates polynomials up to degree 2n-1 exactly.
QuadratureRule gauss_hermite_rule(unsigned n);

}  // namespace lrdemp
