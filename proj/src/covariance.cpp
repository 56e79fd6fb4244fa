#include "lrdemp/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace lrdemp {

double fgn_covariance(double hurst, std::uint64_t lag) {
    if (!(hurst > 0.5 && hurst < 1.0)) {
        throw std::invalid_argument("fgn_covariance: hurst must lie in (0.5, 1)");
    }
    if (lag == 0) return 1.0;
    const double k = static_cast<double>(lag);
    const double a = 2.0 * hurst;
    if (lag < 512) {
        return 0.5 * (std::pow(k + 1.0, a) - 2.0 * std::pow(k, a) + std::pow(k - 1.0, a));
    }
    // Second difference of k^a via its expansion in u = 1/k; the direct form
    // loses ~ eps * k^2 relative accuracy at large lags.
    const double u = 1.0 / k;
    const double u2 = u * u;
    const double c0 = a * (a - 1.0);
    const double c1 = (a - 2.0) * (a - 3.0) / 12.0;
    const double c2 = (a - 2.0) * (a - 3.0) * (a - 4.0) * (a - 5.0) / 360.0;
    return 0.5 * c0 * std::pow(k, a - 2.0) * (1.0 + u2 * (c1 + u2 * c2));
}

CovarianceModel CovarianceModel::fgn(double hurst) {
    if (!(hurst > 0.5 && hurst < 1.0)) {
        throw std::invalid_argument("CovarianceModel::fgn: hurst must lie in (0.5, 1)");
    }
    CovarianceModel m(CovarianceKind::FractionalGaussianNoise);
    m.hurst_ = hurst;
    return m;
}

CovarianceModel CovarianceModel::explicit_sequence(std::vector<double> r) {
    if (r.empty()) {
        throw std::invalid_argument("CovarianceModel::explicit_sequence: empty sequence");
    }
    if (r[0] != 1.0) {
        throw std::invalid_argument("CovarianceModel::explicit_sequence: r(0) must equal 1");
    }
    CovarianceModel m(CovarianceKind::ExplicitSequence);
    m.r_ = std::move(r);
    return m;
}

double CovarianceModel::at(std::uint64_t lag) const {
    switch (kind_) {
        case CovarianceKind::WhiteNoise:
            return lag == 0 ? 1.0 : 0.0;
        case CovarianceKind::FractionalGaussianNoise:
            return fgn_covariance(hurst_, lag);
        case CovarianceKind::ExplicitSequence:
            if (lag >= r_.size()) {
                throw std::out_of_range("CovarianceModel: explicit sequence covers lags 0.." +
                                        std::to_string(r_.size() - 1) + ", requested " +
                                        std::to_string(lag));
            }
            return r_[lag];
    }
    return 0.0;
}

bool CovarianceModel::covers(std::uint64_t lag) const {
    return kind_ != CovarianceKind::ExplicitSequence || lag < r_.size();
}

std::optional<double> CovarianceModel::memory_exponent() const {
    if (kind_ == CovarianceKind::FractionalGaussianNoise) return 2.0 - 2.0 * hurst_;
    return std::nullopt;
}

std::string CovarianceModel::describe() const {
    switch (kind_) {
        case CovarianceKind::WhiteNoise:
            return "white";
        case CovarianceKind::FractionalGaussianNoise:
            return "fgn(H=" + std::to_string(hurst_) + ")";
        case CovarianceKind::ExplicitSequence:
            return "explicit(" + std::to_string(r_.size()) + " lags)";
    }
    return "?";
}

}  // namespace lrdemp
