#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "lrdemp/hermite.hpp"
#include "lrdemp/montecarlo.hpp"
#include "lrdemp/report.hpp"
#include "lrdemp/stats.hpp"
#include "oracles.hpp"

using namespace lrdemp;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n_ladder = {64, 128, 256};
    cfg.replications = 120;
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST_SUITE("ks_distance") {
    TEST_CASE("quantile-matched sample sits at half a step") {
        const std::size_t n = 40;
        std::vector<double> sample;
        for (std::size_t i = 0; i < n; ++i) {
            sample.push_back(oracles::normal_quantile((i + 0.5) / n));
        }
        double d = ks_distance(sample, [](double v) { return normal_cdf(v); });
        CHECK(d <= 0.5 / n + 1e-9);
    }

    TEST_CASE("single observation at the reference median") {
        std::vector<double> sample = {0.0};
        CHECK(ks_distance(sample, [](double v) { return normal_cdf(v); }) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("identical samples have zero distance") {
        std::vector<double> a = {0.2, -1.0, 3.5, 0.2};
        CHECK(ks_distance(a, a) == 0.0);
    }

    TEST_CASE("disjoint samples have distance one") {
        std::vector<double> a = {0.0, 1.0};
        std::vector<double> b = {5.0, 6.0};
        CHECK(ks_distance(a, b) == doctest::Approx(1.0));
    }

    TEST_CASE("empty samples are rejected") {
        std::vector<double> empty;
        CHECK_THROWS_AS(ks_distance(empty, [](double) { return 0.5; }), std::invalid_argument);
    }
}

TEST_SUITE("slope_fit") {
    TEST_CASE("exact line recovers its slope with zero width") {
        std::vector<std::pair<double, double>> pts;
        for (double x : {1.0, 2.0, 3.0, 4.0}) pts.emplace_back(x, 5.0 - x);
        auto fit = slope_fit(pts);
        CHECK(fit.ok);
        CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(fit.half_width_95 == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    }

    TEST_CASE("p = 4/N gives slope -1 and intercept log 4") {
        std::vector<std::pair<double, double>> pts;
        for (double n : {16.0, 64.0, 256.0, 1024.0}) {
            pts.emplace_back(std::log(n), std::log(4.0 / n));
        }
        auto fit = slope_fit(pts);
        CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(std::log(4.0)).epsilon(1e-10));
    }

    TEST_CASE("constant p gives slope zero") {
        std::vector<std::pair<double, double>> pts = {
            {1.0, -2.0}, {2.0, -2.0}, {3.0, -2.0}};
        auto fit = slope_fit(pts);
        CHECK(fit.slope == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    }

    TEST_CASE("fewer than three points is an insufficient-data notice") {
        std::vector<std::pair<double, double>> pts = {{1.0, 1.0}, {2.0, 0.0}};
        CHECK_FALSE(slope_fit(pts).ok);
    }
}

TEST_SUITE("experiment config") {
    TEST_CASE("invalid fields are all reported") {
        ExperimentConfig cfg;
        cfg.n_ladder = {64, 64};
        cfg.epsilon_grid = {0.5, -1.0};
        cfg.t_probes = {0.5, 2.0};
        auto issues = cfg.validate();
        CHECK(issues.size() == 3);
    }

    TEST_CASE("hypothesis check uses the detected rank") {
        ExperimentConfig cfg;
        cfg.model = CovarianceModel::fgn(0.55);  // D = 0.9
        CHECK_FALSE(hypothesis_violation(cfg, 1).has_value());
        CHECK(hypothesis_violation(cfg, 2).has_value());  // mD = 1.8
        cfg.model = CovarianceModel::white();
        CHECK_FALSE(hypothesis_violation(cfg, 4).has_value());  // no exponent
    }
}

TEST_SUITE("run_reduction_experiment") {
    TEST_CASE("estimates are probabilities with binomial standard errors") {
        auto cfg = small_config();
        cfg.replications = 100;
        auto report = run_reduction_experiment(cfg);
        REQUIRE(report.decay.size() == cfg.epsilon_grid.size());
        for (const auto& d : report.decay) {
            for (std::size_t i = 0; i < d.p_hat.size(); ++i) {
                CHECK(d.p_hat[i] >= 0.0);
                CHECK(d.p_hat[i] <= 1.0);
                double expected_se =
                    std::sqrt(d.p_hat[i] * (1.0 - d.p_hat[i]) / cfg.replications);
                CHECK(d.se[i] == doctest::Approx(expected_se).scale(1).epsilon(1e-12));
                CHECK(d.p_hat[i] * cfg.replications ==
                      doctest::Approx(static_cast<double>(d.exceed_counts[i])));
            }
        }
    }

    TEST_CASE("unreachable epsilon reports slope undefined, not failure") {
        auto cfg = small_config();
        cfg.replications = 40;
        cfg.epsilon_grid = {1e6};
        auto report = run_reduction_experiment(cfg);
        REQUIRE(report.decay.size() == 1);
        CHECK(report.decay[0].all_zero);
        CHECK(report.decay[0].nonincreasing_within_2se);
        CHECK_FALSE(report.decay[0].slope.ok);
        CHECK(report.all_pass);
        bool noticed = false;
        for (const auto& n : report.notices) {
            noticed = noticed || n.find("slope undefined") != std::string::npos;
        }
        CHECK(noticed);
    }

    TEST_CASE("reports are identical across worker counts") {
        auto cfg = small_config();
        cfg.n_ladder = {64, 128};
        cfg.replications = 60;
        cfg.keep_raw = true;
        cfg.workers = 1;
        auto serial = run_reduction_experiment(cfg);
        cfg.workers = 4;
        auto parallel = run_reduction_experiment(cfg);
        CHECK(serial.raw_mn == parallel.raw_mn);
        CHECK(report_to_json(serial).dump() == report_to_json(parallel).dump());
    }

    TEST_CASE("hypothesis violation raises before any computation") {
        auto cfg = small_config();
        cfg.model = CovarianceModel::fgn(0.55);
        cfg.g = SubordinationFunction::square();
        CHECK_THROWS_AS(run_reduction_experiment(cfg), HypothesisError);
    }
}

TEST_SUITE("run_moment_check") {
    TEST_CASE("coincident pair has exactly zero second moment") {
        auto cfg = small_config();
        cfg.replications = 30;
        auto report = run_moment_check(cfg, 1.0, {{0.5, 0.5}});
        REQUIRE(report.pairs.size() == 1);
        CHECK(report.pairs[0].skipped);  // F(x, x) = 0: flagged and skipped
    }

    TEST_CASE("massless pair is skipped with a notice") {
        auto cfg = small_config();
        cfg.g = SubordinationFunction::square();
        cfg.replications = 30;
        auto report = run_moment_check(cfg, 1.0, {{-3.0, -2.0}});
        REQUIRE(report.pairs.size() == 1);
        CHECK(report.pairs[0].skipped);
        CHECK(!report.notices.empty());
    }

    TEST_CASE("tiny-sample moments match the quadrature-tensor oracle") {
        // N = 4 with X discretized to the 5-point Gauss-Hermite law: the
        // Monte Carlo estimator must agree with exhaustive enumeration.
        auto profile = HermiteProfile::build(SubordinationFunction::identity());
        auto model = CovarianceModel::fgn(0.75);
        const std::size_t n = 4;
        const double d_n = normalization_dN(model, 1, n);
        const double x = -1.0, y = 1.0;
        const double f_xy = profile.cdf(y) - profile.cdf(x);
        const double dj = profile.coefficient(1, y) - profile.coefficient(1, x);

        // Cholesky factor of the 4x4 fGn covariance.
        double cov[4][4], chol[4][4] = {};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) cov[i][j] = model.at(static_cast<std::size_t>(std::abs(i - j)));
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = cov[i][j];
                for (int k = 0; k < j; ++k) s -= chol[i][k] * chol[j][k];
                chol[i][j] = (i == j) ? std::sqrt(s) : s / chol[j][j];
            }
        }
        auto rule = gauss_hermite_rule(5);
        auto s_value = [&](const std::array<int, 4>& pick) {
            double sum = 0.0;
            double xs[4];
            for (int i = 0; i < 4; ++i) {
                xs[i] = 0.0;
                for (int k = 0; k <= i; ++k) xs[i] += chol[i][k] * rule.nodes[pick[k]];
            }
            for (int i = 0; i < 4; ++i) {
                double ind = (x < xs[i] && xs[i] <= y) ? 1.0 : 0.0;
                sum += ind - f_xy - dj * xs[i];
            }
            return sum / d_n;
        };
        // exhaustive tensor expectation
        double oracle = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c)
                    for (int d = 0; d < 5; ++d) {
                        double wgt = rule.weights[a] * rule.weights[b] * rule.weights[c] *
                                     rule.weights[d];
                        double s = s_value({a, b, c, d});
                        oracle += wgt * s * s;
                    }
        // Monte Carlo from the same discrete law
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double cum[5];
        double acc = 0.0;
        for (int i = 0; i < 5; ++i) {
            acc += rule.weights[i];
            cum[i] = acc;
        }
        const int reps = 4000;
        double mean = 0.0, mean_sq = 0.0;
        for (int r = 0; r < reps; ++r) {
            std::array<int, 4> pick;
            for (int i = 0; i < 4; ++i) {
                double u = unif(rng);
                int idx = 0;
                while (idx < 4 && u > cum[idx]) ++idx;
                pick[i] = idx;
            }
            double s = s_value(pick);
            mean += s * s;
            mean_sq += s * s * s * s;
        }
        mean /= reps;
        mean_sq /= reps;
        double se = std::sqrt((mean_sq - mean * mean) / reps);
        CHECK(std::fabs(mean - oracle) < 3.0 * se);
    }
}

TEST_SUITE("run_limit_experiment") {
    TEST_CASE("degenerate probes are skipped with explicit notices") {
        auto cfg = small_config();
        cfg.g = SubordinationFunction::square();
        cfg.model = CovarianceModel::fgn(0.9);
        cfg.replications = 30;
        cfg.x_probes = {0.0, 1.0};  // J_2(0) = 0 for the square map
        cfg.t_probes = {0.0, 1.0};  // t = 0 is a point mass
        auto report = run_limit_experiment(cfg);
        int skipped = 0;
        for (const auto& probe : report.probes) skipped += probe.skipped ? 1 : 0;
        CHECK(skipped == 3);  // (0, 0), (0, 1), (1, 0)
        CHECK(report.flags_suppressed);  // R < 100
        CHECK(report.notices.size() >= 3);
    }

    TEST_CASE("rank-1 reference standard deviation follows t^{1-D/2}") {
        auto cfg = small_config();
        cfg.n_ladder = {64};
        cfg.replications = 50;
        cfg.x_probes = {0.0};
        cfg.t_probes = {0.25, 1.0};
        auto report = run_limit_experiment(cfg);
        REQUIRE(report.probes.size() == 2);
        double sigma_quarter = report.probes[0].sigma_ref;
        double sigma_full = report.probes[1].sigma_ref;
        CHECK(sigma_full == doctest::Approx(normal_pdf(0.0)).epsilon(1e-12));
        CHECK(sigma_quarter ==
              doctest::Approx(normal_pdf(0.0) * std::pow(0.25, 0.75)).epsilon(1e-12));
    }

    TEST_CASE("white noise model is rejected for limit comparisons") {
        auto cfg = small_config();
        cfg.model = CovarianceModel::white();
        cfg.replications = 30;
        CHECK_THROWS_AS(run_limit_experiment(cfg), HypothesisError);
    }
}
