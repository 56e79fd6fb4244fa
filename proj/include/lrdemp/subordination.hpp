// Subordination maps G and their sublevel sets {s : G(s) <= x}.
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lrdemp/gaussian_path.hpp"

namespace lrdemp {

struct RealInterval {
    double lo;  // -inf allowed
    double hi;  // +inf allowed
};

enum class SubordinationKind { Identity, Square, Cube, HermiteCombo, CustomMonotone };

// A measurable map G with enough structure to resolve {s : G(s) <= x} into a
// finite union of disjoint sorted intervals. Hermite combinations G(s) =
// sum_q c_q H_q(s) locate interval endpoints by a sign scan over the Cauchy
// root bound followed by bracketed bisection to 1e-12.
class SubordinationFunction {
  public:
    static SubordinationFunction identity();
    static SubordinationFunction square();
    static SubordinationFunction cube();
    static SubordinationFunction hermite_combo(std::vector<double> coefficients);
    // Strictly monotone user map; [bracket_lo, bracket_hi] must contain the
    // solution of G(s) = x for every x of interest (it is expanded as needed).
    static SubordinationFunction custom_monotone(std::function<double(double)> g, bool increasing,
                                                 double bracket_lo, double bracket_hi);

    double operator()(double s) const;
    std::vector<RealInterval> sublevel(double x) const;

    SubordinationKind kind() const { return kind_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::string& name() const { return name_; }

  private:
    SubordinationFunction() = default;

    SubordinationKind kind_ = SubordinationKind::Identity;
    std::vector<double> coeffs_;       // HermiteCombo only
    std::vector<double> monomial_;     // HermiteCombo in monomial form
    std::function<double(double)> fn_;
    bool increasing_ = true;
    double bracket_lo_ = -1.0, bracket_hi_ = 1.0;
    std::string name_;
};

struct SubordinatedSample {
    std::vector<double> y;
    std::string g_id;
    std::uint64_t source_seed = 0;

    std::size_t size() const { return y.size(); }
};

SubordinatedSample subordinate(const GaussianPath& path, const SubordinationFunction& g);

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

}  // namespace lrdemp
