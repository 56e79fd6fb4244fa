// Covariance models for the stationary Gaussian input sequence.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lrdemp {

// r(k) for fractional Gaussian noise with Hurst exponent H in (1/2, 1):
//   r(k) = ((k+1)^{2H} - 2 k^{2H} + (k-1)^{2H}) / 2,  r(0) = 1.
// Large lags switch to a series form of the second difference to avoid
// cancellation; r(k) * k^{2-2H} -> H(2H-1).
double fgn_covariance(double hurst, std::uint64_t lag);

enum class CovarianceKind { FractionalGaussianNoise, ExplicitSequence, WhiteNoise };

class CovarianceModel {
  public:
    static CovarianceModel fgn(double hurst);
    static CovarianceModel white() { return CovarianceModel(CovarianceKind::WhiteNoise); }
    static CovarianceModel explicit_sequence(std::vector<double> r);

    CovarianceKind kind() const { return kind_; }
    double hurst() const { return hurst_; }

    // r(lag); throws if an explicit sequence does not cover the lag.
    double at(std::uint64_t lag) const;
    bool covers(std::uint64_t lag) const;

    // Memory exponent D with r(k) ~ k^{-D}: D = 2 - 2H for fGn, absent for
    // white noise and explicit sequences.
    std::optional<double> memory_exponent() const;

    std::string describe() const;

  private:
    explicit CovarianceModel(CovarianceKind kind) : kind_(kind) {}

    CovarianceKind kind_;
    double hurst_ = 0.0;
    std::vector<double> r_;
};

}  // namespace lrdemp
