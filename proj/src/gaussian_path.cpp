#include "lrdemp/gaussian_path.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <random>

namespace lrdemp {

namespace {

constexpr double kSpectrumTol = 1e-10;  // relative clamp threshold

// FFTW planning is not thread-safe; plans are cached per size and executed
// through the new-array interface on per-call buffers.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan plan_for_size(std::size_t m) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(m);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    cache.emplace(m, plan);
    return plan;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t m) : data(fftw_alloc_complex(m)) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

void dft_in_place(fftw_complex* buf, std::size_t m) {
    fftw_plan plan = plan_for_size(m);
    fftw_execute_dft(plan, buf, buf);
}

// First row of the length-2N even extension. The middle entry c_N never
// enters the covariance of the first N samples, so when an explicit sequence
// stops at lag N-1 the last available lag is reused there.
std::vector<double> circulant_first_row(const CovarianceModel& model, std::size_t n) {
    const std::size_t m = 2 * n;
    std::vector<double> c(m);
    for (std::size_t j = 0; j < n; ++j) c[j] = model.at(j);
    c[n] = model.covers(n) ? model.at(n) : model.at(n - 1);
    for (std::size_t j = n + 1; j < m; ++j) c[j] = c[m - j];
    return c;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

std::vector<double> circulant_spectrum(const CovarianceModel& model, std::size_t n) {
    if (n == 0) throw std::invalid_argument("circulant_spectrum: n must be positive");
    if (!model.covers(n - 1)) {
        throw std::out_of_range("circulant_spectrum: explicit sequence must cover lags 0..n-1");
    }
    if (n == 1) return {1.0};
    std::vector<double> c = circulant_first_row(model, n);
    const std::size_t m = c.size();
    FftwBuffer buf(m);
    for (std::size_t j = 0; j < m; ++j) {
        buf.data[j][0] = c[j];
        buf.data[j][1] = 0.0;
    }
    dft_in_place(buf.data, m);
    std::vector<double> lambda(m);
    for (std::size_t k = 0; k < m; ++k) lambda[k] = buf.data[k][0];
    return lambda;
}

GaussianPath generate_path(const CovarianceModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("generate_path: n must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    GaussianPath path{std::vector<double>(n), model, seed};

    if (model.kind() == CovarianceKind::WhiteNoise || n == 1) {
        for (std::size_t j = 0; j < n; ++j) path.values[j] = gauss(rng);
        return path;
    }

    std::vector<double> lambda = circulant_spectrum(model, n);
    const std::size_t m = lambda.size();
    double lambda_max = 0.0;
    for (double v : lambda) lambda_max = std::max(lambda_max, v);
    for (std::size_t k = 0; k < m; ++k) {
        if (lambda[k] < -kSpectrumTol * lambda_max) {
            throw EmbeddingError(k, lambda[k],
                                 "generate_path: negative circulant spectral weight " +
                                     std::to_string(lambda[k]) + " at frequency index " +
                                     std::to_string(k));
        }
        if (lambda[k] < 0.0) lambda[k] = 0.0;
    }

    // Hermitian-symmetric complex normals weighted by sqrt(lambda); the
    // transformed sequence is real with covariance equal to the circulant.
    // Draw order: k = 0, then (re, im) for k = 1..m/2-1, then k = m/2.
    FftwBuffer buf(m);
    const std::size_t half = m / 2;
    buf.data[0][0] = std::sqrt(lambda[0]) * gauss(rng);
    buf.data[0][1] = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
        const double scale = std::sqrt(0.5 * lambda[k]);
        const double re = scale * gauss(rng);
        const double im = scale * gauss(rng);
        buf.data[k][0] = re;
        buf.data[k][1] = im;
        buf.data[m - k][0] = re;
        buf.data[m - k][1] = -im;
    }
    buf.data[half][0] = std::sqrt(lambda[half]) * gauss(rng);
    buf.data[half][1] = 0.0;

    dft_in_place(buf.data, m);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t j = 0; j < n; ++j) path.values[j] = norm * buf.data[j][0];
    return path;
}

}  // namespace lrdemp
