#include "lrdemp/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lrdemp/hermite.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp {

namespace {

double weighted_tail_mass(const HermiteProfile& profile, double x, std::size_t n, double d_n,
                          bool left) {
    WeightFunction w = profile.weight();
    double mass = left ? profile.cdf(x) : 1.0 - profile.cdf(x);
    return w(x) * static_cast<double>(n) * mass / d_n;
}

double factorial(unsigned m) {
    double f = 1.0;
    for (unsigned q = 2; q <= m; ++q) f *= static_cast<double>(q);
    return f;
}

// Index of the first x node >= v (nodes sorted ascending); nodes.size() when
// v exceeds every node. 1{Y_j <= x_k} is 1 exactly for k >= bucket(Y_j).
std::size_t bucket_of(const std::vector<double>& nodes, double v) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) -
                                    nodes.begin());
}

}  // namespace

void GridSpec::validate_shape() const {
    if (x_nodes.empty()) throw GridError("grid: x_nodes empty");
    for (std::size_t i = 1; i < x_nodes.size(); ++i) {
        if (!(x_nodes[i - 1] < x_nodes[i])) {
            throw GridError("grid: x_nodes must be strictly increasing (index " +
                            std::to_string(i) + ")");
        }
    }
    if (t_nodes.empty()) throw GridError("grid: t_nodes empty");
    bool has_one = false;
    for (std::size_t i = 0; i < t_nodes.size(); ++i) {
        double t = t_nodes[i];
        if (t < 0.0 || t > 1.0) throw GridError("grid: t nodes must lie in [0, 1]");
        if (i > 0 && t < t_nodes[i - 1]) throw GridError("grid: t_nodes must be sorted");
        if (t == 1.0) has_one = true;
    }
    if (!has_one) throw GridError("grid: t_nodes must contain 1");
}

void GridSpec::validate_tails(const HermiteProfile& profile, std::size_t n, double d_n) const {
    const double left = weighted_tail_mass(profile, x_nodes.front(), n, d_n, true);
    if (!(left < tail_tol)) {
        throw GridError("grid: left tail mass " + std::to_string(left) +
                        " at x = " + std::to_string(x_nodes.front()) +
                        " exceeds tail_tol; extend the grid further left");
    }
    const double right = weighted_tail_mass(profile, x_nodes.back(), n, d_n, false);
    if (!(right < tail_tol)) {
        throw GridError("grid: right tail mass " + std::to_string(right) +
                        " at x = " + std::to_string(x_nodes.back()) +
                        " exceeds tail_tol; extend the grid further right");
    }
}

GridSpec build_grid(const HermiteProfile& profile, std::size_t n, double d_n,
                    const GridBuildOptions& opts) {
    if (!(opts.mesh_step > 0.0)) throw GridError("grid: mesh_step must be positive");
    double lo = -1.0, hi = 1.0;
    for (double x : opts.extra_x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    int guard = 0;
    while (!(weighted_tail_mass(profile, lo, n, d_n, true) < opts.tail_tol) && guard++ < 4000) {
        lo -= std::max(opts.mesh_step, 0.25);
    }
    guard = 0;
    while (!(weighted_tail_mass(profile, hi, n, d_n, false) < opts.tail_tol) && guard++ < 4000) {
        hi += std::max(opts.mesh_step, 0.25);
    }

    GridSpec grid;
    grid.tail_tol = opts.tail_tol;
    grid.t_nodes = opts.t_nodes;
    std::sort(grid.t_nodes.begin(), grid.t_nodes.end());
    grid.t_nodes.erase(std::unique(grid.t_nodes.begin(), grid.t_nodes.end()),
                       grid.t_nodes.end());

    for (double x = lo; x <= hi + 0.5 * opts.mesh_step; x += opts.mesh_step) {
        grid.x_nodes.push_back(x);
    }
    grid.x_nodes.insert(grid.x_nodes.end(), opts.extra_x.begin(), opts.extra_x.end());
    std::sort(grid.x_nodes.begin(), grid.x_nodes.end());
    grid.x_nodes.erase(std::unique(grid.x_nodes.begin(), grid.x_nodes.end()),
                       grid.x_nodes.end());

    grid.validate_shape();
    grid.validate_tails(profile, n, d_n);
    return grid;
}

EmpiricalField sequential_empirical(const SubordinatedSample& y, const HermiteProfile& profile,
                                    const GridSpec& grid, double d_n) {
    grid.validate_shape();
    const std::size_t n = y.size();
    grid.validate_tails(profile, n, d_n);
    const std::size_t nx = grid.x_nodes.size();
    const std::size_t nt = grid.t_nodes.size();

    // floor(N t) per t node.
    std::vector<std::size_t> counts_n(nt);
    for (std::size_t it = 0; it < nt; ++it) {
        counts_n[it] = static_cast<std::size_t>(std::floor(static_cast<double>(n) *
                                                           grid.t_nodes[it]));
    }

    // Bucket counts B[ix][it]: samples falling at x bucket ix within the
    // t-slice (counts_n[it-1], counts_n[it]]; 2-D prefix sums then give
    // #{j <= floor(Nt) : Y_j <= x} for every pair.
    std::vector<std::uint32_t> buckets(nx * nt, 0);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t ix = bucket_of(grid.x_nodes, y.y[j]);
        if (ix == nx) continue;  // above the top node: never counted
        // First t slice containing index j (1-based sample count j+1).
        std::size_t it = static_cast<std::size_t>(
            std::lower_bound(counts_n.begin(), counts_n.end(), j + 1) - counts_n.begin());
        if (it == nt) continue;  // beyond floor(N t_max)
        ++buckets[ix * nt + it];
    }

    EmpiricalField field;
    field.nx = nx;
    field.nt = nt;
    field.grid = grid;
    field.kind = FieldKind::RNNormalized;
    field.sample_size = n;
    field.partial_n = n;
    field.d_n = d_n;
    field.seed = y.source_seed;
    field.values.resize(nx * nt);

    const double inv = 1.0 / d_n;
    std::vector<double> col_acc(nt, 0.0);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double f = profile.cdf(grid.x_nodes[ix]);
        double run = 0.0;
        for (std::size_t it = 0; it < nt; ++it) {
            run += buckets[ix * nt + it];
            col_acc[it] += run;  // cumulative over x then t
        }
        for (std::size_t it = 0; it < nt; ++it) {
            field.values[ix * nt + it] =
                inv * (col_acc[it] - static_cast<double>(counts_n[it]) * f);
        }
    }
    return field;
}

EmpiricalField reduction_remainder(const SubordinatedSample& y, const GaussianPath& x_path,
                                   const HermiteProfile& profile, std::size_t n,
                                   const GridSpec& grid, double d_n) {
    if (y.size() != x_path.size()) {
        throw std::invalid_argument("reduction_remainder: Y and X lengths differ");
    }
    if (n > y.size()) {
        throw std::invalid_argument("reduction_remainder: n exceeds the sample length");
    }
    grid.validate_shape();

    const unsigned m = profile.rank();
    const double inv_mfact = 1.0 / factorial(m);
    double hermite_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) hermite_sum += hermite_eval(m, x_path.values[j]);

    const std::size_t nx = grid.x_nodes.size();
    EmpiricalField field;
    field.nx = nx;
    field.nt = 1;
    field.grid = grid;
    field.grid.t_nodes = {1.0};
    field.kind = FieldKind::SNRemainder;
    field.sample_size = y.size();
    field.partial_n = n;
    field.d_n = d_n;
    field.seed = y.source_seed;
    field.values.resize(nx);

    std::vector<std::uint32_t> buckets(nx + 1, 0);
    for (std::size_t j = 0; j < n; ++j) ++buckets[bucket_of(grid.x_nodes, y.y[j])];

    const double inv = 1.0 / d_n;
    double count = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        count += buckets[ix];
        const double x = grid.x_nodes[ix];
        const double f = profile.cdf(x);
        const double jm = profile.coefficient(m, x);
        field.values[ix] =
            inv * (count - static_cast<double>(n) * f - jm * inv_mfact * hermite_sum);
    }
    return field;
}

SupNorm weighted_sup_norm(const EmpiricalField& field, const WeightFunction& w) {
    SupNorm sup;
    for (std::size_t ix = 0; ix < field.nx; ++ix) {
        const double wx = w(field.grid.x_nodes[ix]);
        for (std::size_t it = 0; it < field.nt; ++it) {
            double v = std::fabs(wx * field.at(ix, it));
            if (v > sup.value) {
                sup.value = v;
                sup.arg_ix = ix;
                sup.arg_it = it;
            }
        }
    }
    sup.arg_x = field.grid.x_nodes[sup.arg_ix];
    sup.arg_t = field.nt == 1 ? 1.0 : field.grid.t_nodes[sup.arg_it];
    return sup;
}

ReductionStatistic reduction_statistic(const SubordinatedSample& y, const GaussianPath& x_path,
                                       const HermiteProfile& profile,
                                       const std::vector<double>& x_nodes, double d_n,
                                       const WeightFunction& w) {
    if (y.size() != x_path.size()) {
        throw std::invalid_argument("reduction_statistic: Y and X lengths differ");
    }
    const std::size_t n_total = y.size();
    ReductionStatistic stat;
    if (n_total == 0 || x_nodes.empty()) return stat;

    const std::size_t nx = x_nodes.size();
    const unsigned m = profile.rank();
    const double inv_mfact = 1.0 / factorial(m);
    const double inv = 1.0 / d_n;

    std::vector<double> f_vals(nx), cjm_vals(nx), w_vals(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = x_nodes[ix];
        f_vals[ix] = profile.cdf(x);
        cjm_vals[ix] = profile.coefficient(m, x) * inv_mfact;
        w_vals[ix] = w(x);
    }

    std::vector<std::size_t> sample_bucket(n_total);
    for (std::size_t j = 0; j < n_total; ++j) sample_bucket[j] = bucket_of(x_nodes, y.y[j]);

    std::vector<std::uint32_t> buckets(nx + 1, 0);
    double hermite_sum = 0.0;
    for (std::size_t step = 1; step <= n_total; ++step) {
        ++buckets[sample_bucket[step - 1]];
        hermite_sum += hermite_eval(m, x_path.values[step - 1]);
        const double dn = static_cast<double>(step);
        double count = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            count += buckets[ix];
            const double s = inv * (count - dn * f_vals[ix] - cjm_vals[ix] * hermite_sum);
            const double v = std::fabs(w_vals[ix] * s);
            if (v > stat.value) {
                stat.value = v;
                stat.arg_n = step;
                stat.arg_x = x_nodes[ix];
            }
        }
    }
    return stat;
}

std::vector<double> sup_evaluation_nodes(const HermiteProfile& profile,
                                         const SubordinatedSample& y, std::size_t n, double d_n,
                                         const std::vector<double>& extra, double mesh_step,
                                         double tail_tol) {
    GridBuildOptions opts;
    opts.mesh_step = mesh_step;
    opts.tail_tol = tail_tol;
    opts.extra_x = extra;
    GridSpec base = build_grid(profile, n, d_n, opts);

    std::vector<double> nodes = std::move(base.x_nodes);
    nodes.insert(nodes.end(), y.y.begin(), y.y.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

void write_field_csv(const EmpiricalField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    out << "x,t,value,kind,N,seed\n";
    const char* kind = field.kind == FieldKind::RNNormalized ? "RN_normalized" : "SN_remainder";
    char buf[64];
    for (std::size_t ix = 0; ix < field.nx; ++ix) {
        for (std::size_t it = 0; it < field.nt; ++it) {
            std::snprintf(buf, sizeof(buf), "%.17g", field.grid.x_nodes[ix]);
            out << buf << ',';
            double t = field.nt == 1 ? 1.0 : field.grid.t_nodes[it];
            std::snprintf(buf, sizeof(buf), "%.17g", t);
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", field.at(ix, it));
            out << buf << ',' << kind << ',' << field.sample_size << ',' << field.seed << '\n';
        }
    }
}

}  // namespace lrdemp
