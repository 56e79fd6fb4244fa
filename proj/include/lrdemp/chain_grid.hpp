// Refining partitions driven by w * Lambda, their spacing inequality and the
// associated summability checks.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lrdemp/profile.hpp"

namespace lrdemp {

enum class ChainSide { Positive, Negative };

// One side of the chaining construction. Level k holds the nodes
//   positive: x_i(k) = inf{x >= 0 : w(x) Lambda(x) >= Lambda(0) + i 2^-k}
//   negative: y_i(k) = sup{y <= 0 : w(y)(Lambda(0) - Lambda(y)) >= i 2^-k}
// solved by monotone bisection; level k+1 refines level k at even indices.
struct ChainGrid {
    ChainSide side = ChainSide::Positive;
    std::vector<std::vector<double>> levels;  // levels[k][i]
    unsigned k_max = 0;
    std::size_t i_max = 0;
    double lambda = 0.0;
    double anchor = 0.0;  // Lambda(0)
    bool truncated = true;  // the true grids are infinite; budget recorded
    bool empty_side = false;  // no marginal mass on this side (degenerate)
};

class ChainGridError : public std::runtime_error {
  public:
    explicit ChainGridError(const std::string& msg) : std::runtime_error(msg) {}
};

// Builds one side. Lambda(0) = 0 is tolerated when the marginal carries no
// mass below zero (the negative side is then empty and positive targets
// start from zero); it is an error when mass exists below the anchor.
ChainGrid build_chain_grid(const HermiteProfile& profile, ChainSide side, unsigned k_max,
                           std::size_t i_max);

struct ChainLevelCheck {
    unsigned level = 0;
    double max_spacing = 0.0;    // max_i w(next) * Lambda(node_i, next-)
    double min_slack = 0.0;      // 2^-k minus the worst spacing
    double series_sum = 0.0;     // level sum of w^2 * marginal increments
    double series_ratio = 0.0;   // level sum / level-0 sum
    bool spacing_ok = false;
    bool series_ok = false;
};

struct ChainGridReport {
    ChainSide side = ChainSide::Positive;
    std::vector<ChainLevelCheck> levels;
    double base_tail_sum = 0.0;        // level-0 weighted tail series
    double base_tail_last_increment = 0.0;
    bool base_tail_stabilized = false;
    bool all_pass = false;
};

// Evaluates the spacing inequality per level (slack tolerance -1e-9), the
// level-0 tail series stabilization and the level-k/level-0 sum monotonicity.
ChainGridReport verify_chain_grid(const ChainGrid& grid, const HermiteProfile& profile);

// K = floor(log2(8 N / (d_N eps))) + 1; guarantees
// eps/2 - 2 N 2^-K / d_N >= eps/4 (asserted).
int chaining_depth(std::size_t n, double d_n, double epsilon);

void write_chain_grid_csv(const ChainGrid& grid, const ChainGridReport& report,
                          const std::string& path);

}  // namespace lrdemp
