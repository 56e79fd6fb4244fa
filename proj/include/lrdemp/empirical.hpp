// Sequential empirical process R_N(x, t), the reduction remainder S_N(n, x)
// and weighted sup-norms on finite (x, t) grids with tail certificates.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lrdemp/profile.hpp"

namespace lrdemp {

class GridError : public std::runtime_error {
  public:
    explicit GridError(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridSpec {
    std::vector<double> x_nodes;  // strictly increasing
    std::vector<double> t_nodes;  // within [0, 1], contains 1
    double tail_tol = 1e-8;

    // Structural checks (ordering, ranges); throws GridError.
    void validate_shape() const;

    // Tail adequacy at the extreme nodes: the weighted mass beyond the grid,
    // w(x) * N * F(x_lo) / d_N on the left and w(x) * N * (1 - F(x_hi)) / d_N
    // on the right, must drop below tail_tol. Throws GridError naming the
    // required extension.
    void validate_tails(const HermiteProfile& profile, std::size_t n, double d_n) const;
};

struct GridBuildOptions {
    double mesh_step = 0.01;
    double tail_tol = 1e-8;
    std::vector<double> extra_x;  // probe nodes forced into the grid
    std::vector<double> t_nodes = {1.0};
};

// Uniform mesh extended outward until both tails pass the adequacy bound,
// with probe nodes merged in.
GridSpec build_grid(const HermiteProfile& profile, std::size_t n, double d_n,
                    const GridBuildOptions& opts);

enum class FieldKind { RNNormalized, SNRemainder };

struct EmpiricalField {
    std::vector<double> values;  // row-major [ix * nt + it]
    std::size_t nx = 0;
    std::size_t nt = 0;
    GridSpec grid;
    FieldKind kind = FieldKind::RNNormalized;
    std::uint64_t sample_size = 0;  // N
    std::uint64_t partial_n = 0;    // n for SNRemainder fields
    double d_n = 1.0;
    std::uint64_t seed = 0;

    double at(std::size_t ix, std::size_t it) const { return values[ix * nt + it]; }
};

// R_N(x, t) = sum_{j <= floor(Nt)} (1{Y_j <= x} - F(x)), scaled by 1/d_N.
// Counting runs off one sort of Y merged against the x nodes.
EmpiricalField sequential_empirical(const SubordinatedSample& y, const HermiteProfile& profile,
                                    const GridSpec& grid, double d_n);

// S_N(n, x) = (1/d_N) sum_{j <= n} (1{Y_j <= x} - F(x) - J_m(x)/m! H_m(X_j))
// over the grid's x nodes (single-column field, t node pinned at 1).
EmpiricalField reduction_remainder(const SubordinatedSample& y, const GaussianPath& x_path,
                                   const HermiteProfile& profile, std::size_t n,
                                   const GridSpec& grid, double d_n);

struct SupNorm {
    double value = 0.0;
    std::size_t arg_ix = 0;
    std::size_t arg_it = 0;
    double arg_x = 0.0;
    double arg_t = 0.0;
};

SupNorm weighted_sup_norm(const EmpiricalField& field, const WeightFunction& w);

struct ReductionStatistic {
    double value = 0.0;   // M_N = max_{n<=N} sup_x |w(x) S_N(n, x)|
    std::size_t arg_n = 0;
    double arg_x = 0.0;
};

// Incremental sweep over n = 1..N; O(N * |x|) after precomputing F, J_m and w
// on the grid nodes.
ReductionStatistic reduction_statistic(const SubordinatedSample& y, const GaussianPath& x_path,
                                       const HermiteProfile& profile,
                                       const std::vector<double>& x_nodes, double d_n,
                                       const WeightFunction& w);

// Union of sample points, extra nodes and a tail-adequate uniform mesh; the
// default evaluation grid for sup-norm statistics.
std::vector<double> sup_evaluation_nodes(const HermiteProfile& profile,
                                         const SubordinatedSample& y, std::size_t n, double d_n,
                                         const std::vector<double>& extra, double mesh_step,
                                         double tail_tol);

void write_field_csv(const EmpiricalField& field, const std::string& path);

}  // namespace lrdemp
