// Exact synthesis of stationary Gaussian sequences by circulant embedding.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lrdemp/covariance.hpp"

namespace lrdemp {

struct GaussianPath {
    std::vector<double> values;
    CovarianceModel model;
    std::uint64_t seed = 0;

    std::size_t size() const { return values.size(); }
};

// Raised when the circulant extension has a materially negative spectral
// weight (the covariance sequence is not embeddable at this length).
class EmbeddingError : public std::runtime_error {
  public:
    EmbeddingError(std::size_t frequency_index, double weight, std::string msg)
        : std::runtime_error(std::move(msg)), frequency_index_(frequency_index), weight_(weight) {}
    std::size_t frequency_index() const { return frequency_index_; }
    double weight() const { return weight_; }

  private:
    std::size_t frequency_index_;
    double weight_;
};

// Deterministic 64-bit child-seed derivation: stream k of a master seed is
//   avalanche(seed + (k + 1) * 0x9E3779B97F4A7C15)
// with the splitmix64 finalizer as avalanche stage, so parallel and serial
// replication sweeps draw from identical streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Spectral weights of the length-2N even circulant extension of r(0..N).
// Tiny negative weights (>= -1e-10 relative to the largest) are clamped to
// zero by the generator; anything worse raises EmbeddingError.
std::vector<double> circulant_spectrum(const CovarianceModel& model, std::size_t n);

// Draws one length-n path with exactly the model covariance. Deterministic in
// (model, n, seed); white noise bypasses the transform and draws i.i.d.
// normals directly.
GaussianPath generate_path(const CovarianceModel& model, std::size_t n, std::uint64_t seed);

}  // namespace lrdemp
