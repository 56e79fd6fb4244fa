#include <doctest.h>

#include <cmath>
#include <set>

#include "lrdemp/gaussian_path.hpp"
#include "lrdemp/hermite.hpp"
#include "lrdemp/stats.hpp"
#include "lrdemp/subordination.hpp"
#include "oracles.hpp"

using namespace lrdemp;

TEST_SUITE("fgn_covariance") {
    TEST_CASE("unit variance at lag zero") {
        CHECK(fgn_covariance(0.75, 0) == 1.0);
        CHECK(fgn_covariance(0.6, 0) == 1.0);
    }

    TEST_CASE("white noise kind exposes the independence case") {
        auto white = CovarianceModel::white();
        CHECK(white.at(0) == 1.0);
        CHECK(white.at(1) == 0.0);
        CHECK(white.at(100) == 0.0);
    }

    TEST_CASE("closed form at H = 0.75, lag 1") {
        // (2^1.5 - 2) / 2 by hand calculator
        CHECK(fgn_covariance(0.75, 1) == doctest::Approx(0.41421356237).epsilon(1e-9));
    }

    TEST_CASE("large-lag series form joins the direct form smoothly") {
        for (double h : {0.6, 0.75, 0.9}) {
            double direct = 0.5 * (std::pow(512.0, 2 * h) - 2.0 * std::pow(511.0, 2 * h) +
                                   std::pow(510.0, 2 * h));
            CHECK(fgn_covariance(h, 511) == doctest::Approx(direct).epsilon(1e-9));
            // r(k) k^D -> H(2H-1)
            double d = 2.0 - 2.0 * h;
            double limit = h * (2.0 * h - 1.0);
            CHECK(fgn_covariance(h, 1 << 20) * std::pow(std::ldexp(1.0, 20), d) ==
                  doctest::Approx(limit).epsilon(1e-3));
        }
    }

    TEST_CASE("domain errors") {
        CHECK_THROWS_AS(fgn_covariance(0.5, 1), std::invalid_argument);
        CHECK_THROWS_AS(fgn_covariance(1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(fgn_covariance(1.2, 1), std::invalid_argument);
    }
}

TEST_SUITE("hermite_eval") {
    TEST_CASE("low order values") {
        CHECK(hermite_eval(0, 3.0) == 1.0);
        CHECK(hermite_eval(1, 3.5) == 3.5);
        CHECK(hermite_eval(2, 1.0) == 0.0);  // H_2(x) = x^2 - 1
        CHECK(hermite_eval(3, 2.0) == doctest::Approx(2.0).epsilon(1e-14));  // x^3 - 3x
    }

    TEST_CASE("recurrence matches explicit polynomial coefficients") {
        // q <= 10, x grid in [-5, 5], relative to the conditioning scale
        for (unsigned q = 0; q <= 10; ++q) {
            auto coeffs = oracles::hermite_monomial(q);
            for (double x = -5.0; x <= 5.0001; x += 0.125) {
                long double expected = oracles::horner(coeffs, x);
                long double scale = oracles::horner_scale(coeffs, x);
                CHECK(std::fabs(hermite_eval(q, x) - static_cast<double>(expected)) <=
                      1e-12 * static_cast<double>(scale));
            }
        }
    }

    TEST_CASE("orthogonality against the normal density") {
        // integral of H_p H_q phi over [-12, 12] = q! delta_pq within 1e-8
        std::vector<std::vector<double>> coeffs;
        for (unsigned q = 0; q <= 6; ++q) coeffs.push_back(oracles::hermite_monomial(q));
        for (unsigned p = 0; p <= 6; ++p) {
            for (unsigned q = p; q <= 6; ++q) {
                double integral = oracles::simpson_fixed(
                    [&](double s) {
                        return static_cast<double>(oracles::horner(coeffs[p], s)) *
                               static_cast<double>(oracles::horner(coeffs[q], s)) *
                               normal_pdf(s);
                    },
                    -12.0, 12.0, 48000);
                double expected = 0.0;
                if (p == q) {
                    expected = 1.0;
                    for (unsigned k = 2; k <= q; ++k) expected *= k;
                }
                CHECK(integral == doctest::Approx(expected).epsilon(0).scale(1).epsilon(1e-12));
                CHECK(std::fabs(integral - expected) < 1e-8);
            }
        }
    }

    TEST_CASE("gauss hermite rule integrates polynomials exactly") {
        auto rule = gauss_hermite_rule(5);
        REQUIRE(rule.nodes.size() == 5);
        double w_sum = 0.0, second = 0.0, fourth = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            w_sum += rule.weights[i];
            second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
            fourth += rule.weights[i] * std::pow(rule.nodes[i], 4);
        }
        CHECK(w_sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(second == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fourth == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_SUITE("generate_path") {
    TEST_CASE("deterministic in seed") {
        auto model = CovarianceModel::fgn(0.75);
        auto a = generate_path(model, 8, 7);
        auto b = generate_path(model, 8, 7);
        CHECK(a.values == b.values);
        auto c = generate_path(model, 8, 8);
        CHECK(a.values != c.values);
    }

    TEST_CASE("white noise lag-1 covariance vanishes") {
        auto model = CovarianceModel::white();
        const int reps = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (int r = 0; r < reps; ++r) {
            auto p = generate_path(model, 4, mix_seed(42, r));
            double c = (p.values[0] * p.values[1] + p.values[1] * p.values[2] +
                        p.values[2] * p.values[3]) /
                       3.0;
            sum += c;
            sum_sq += c * c;
        }
        double mean = sum / reps;
        double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
        CHECK(std::fabs(mean) < 3.0 * se);
    }

    TEST_CASE("fgn sample autocovariance tracks the model at lags 0..10") {
        auto model = CovarianceModel::fgn(0.75);
        const std::size_t n = 1 << 14;
        const int reps = 200;
        std::vector<double> acc(11, 0.0), acc_sq(11, 0.0);
        for (int r = 0; r < reps; ++r) {
            auto p = generate_path(model, n, mix_seed(1234, r));
            for (int k = 0; k <= 10; ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j + k < n; ++j) s += p.values[j] * p.values[j + k];
                s /= static_cast<double>(n - k);
                acc[k] += s;
                acc_sq[k] += s * s;
            }
        }
        for (int k = 0; k <= 10; ++k) {
            double mean = acc[k] / reps;
            double se = std::sqrt((acc_sq[k] / reps - mean * mean) / reps);
            CHECK(std::fabs(mean - model.at(k)) < 3.0 * se);
        }
    }

    TEST_CASE("exact covariance matrix within Monte Carlo error") {
        auto model = CovarianceModel::fgn(0.75);
        const std::size_t n = 16;
        const int reps = 20000;
        std::vector<double> acc(n * n, 0.0), acc_sq(n * n, 0.0);
        for (int r = 0; r < reps; ++r) {
            auto p = generate_path(model, n, mix_seed(77, r));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    double v = p.values[i] * p.values[j];
                    acc[i * n + j] += v;
                    acc_sq[i * n + j] += v * v;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                double mean = acc[i * n + j] / reps;
                double se = std::sqrt((acc_sq[i * n + j] / reps - mean * mean) / reps);
                CHECK(std::fabs(mean - model.at(j - i)) < 4.0 * se);
            }
        }
    }

    TEST_CASE("circulant spectrum stays nonnegative for fgn up to 2^16") {
        for (double h : {0.6, 0.75, 0.9}) {
            auto model = CovarianceModel::fgn(h);
            auto lambda = circulant_spectrum(model, 1 << 16);
            double max = 0.0;
            for (double v : lambda) max = std::max(max, v);
            for (double v : lambda) CHECK(v >= -1e-10 * max);
        }
    }

    TEST_CASE("materially negative spectrum raises a named embedding error") {
        // (1, 0.9, 0) is not a valid covariance: the 3x3 Toeplitz has a
        // negative eigenvalue, and so does its circulant extension.
        auto model = CovarianceModel::explicit_sequence({1.0, 0.9, 0.0});
        CHECK_THROWS_AS(generate_path(model, 3, 1), EmbeddingError);
        try {
            generate_path(model, 3, 1);
        } catch (const EmbeddingError& e) {
            CHECK(e.weight() < 0.0);
            CHECK(std::string(e.what()).find(std::to_string(e.frequency_index())) !=
                  std::string::npos);
        }
    }

    TEST_CASE("explicit sequences must cover lags 0..n-1") {
        auto model = CovarianceModel::explicit_sequence({1.0, 0.2});
        CHECK_THROWS_AS(generate_path(model, 8, 1), std::out_of_range);
    }

    TEST_CASE("child seeds are distinct and reproducible") {
        std::set<std::uint64_t> seen;
        for (std::uint64_t r = 0; r < 100000; ++r) seen.insert(mix_seed(42, r));
        CHECK(seen.size() == 100000);
        CHECK(mix_seed(42, 7) == mix_seed(42, 7));
        CHECK(mix_seed(42, 7) != mix_seed(43, 7));
    }
}

TEST_SUITE("subordinate") {
    TEST_CASE("identity and square apply elementwise") {
        GaussianPath path{{0.5, -1.0}, CovarianceModel::white(), 1};
        auto id = subordinate(path, SubordinationFunction::identity());
        CHECK(id.y == std::vector<double>{0.5, -1.0});
        auto sq = subordinate(path, SubordinationFunction::square());
        CHECK(sq.y == std::vector<double>{0.25, 1.0});
    }

    TEST_CASE("hermite combo evaluates H_2 via the recurrence") {
        GaussianPath path{{2.0}, CovarianceModel::white(), 1};
        auto g = SubordinationFunction::hermite_combo({0.0, 0.0, 1.0});
        auto s = subordinate(path, g);
        CHECK(s.y[0] == doctest::Approx(3.0).epsilon(1e-14));
    }

    TEST_CASE("sample is recomputable from the source path") {
        auto model = CovarianceModel::fgn(0.8);
        auto path = generate_path(model, 64, 5);
        auto g = SubordinationFunction::cube();
        auto s = subordinate(path, g);
        REQUIRE(s.y.size() == path.size());
        for (std::size_t j = 0; j < path.size(); ++j) {
            CHECK(s.y[j] == g(path.values[j]));
        }
    }
}

TEST_SUITE("sublevel sets") {
    TEST_CASE("identity, square and cube closed forms") {
        auto id = SubordinationFunction::identity();
        auto iv = id.sublevel(1.5);
        REQUIRE(iv.size() == 1);
        CHECK(std::isinf(iv[0].lo));
        CHECK(iv[0].hi == 1.5);

        auto sq = SubordinationFunction::square();
        CHECK(sq.sublevel(-0.5).empty());
        auto sq_iv = sq.sublevel(4.0);
        REQUIRE(sq_iv.size() == 1);
        CHECK(sq_iv[0].lo == doctest::Approx(-2.0));
        CHECK(sq_iv[0].hi == doctest::Approx(2.0));

        auto cube = SubordinationFunction::cube();
        auto cube_iv = cube.sublevel(-8.0);
        REQUIRE(cube_iv.size() == 1);
        CHECK(cube_iv[0].hi == doctest::Approx(-2.0));
    }

    TEST_CASE("polynomial sublevel sets match a dense scan") {
        auto g = SubordinationFunction::hermite_combo({0.0, 0.0, 0.0, 1.0});  // H_3
        for (double x : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
            auto lib = g.sublevel(x);
            auto scan = oracles::scan_sublevel([&g](double s) { return g(s); }, x);
            REQUIRE(lib.size() == scan.size());
            for (std::size_t i = 0; i < lib.size(); ++i) {
                double lib_lo = std::isinf(lib[i].lo) ? -12.0 : lib[i].lo;
                double lib_hi = std::isinf(lib[i].hi) ? 12.0 : lib[i].hi;
                CHECK(lib_lo == doctest::Approx(scan[i].lo).epsilon(1e-7));
                CHECK(lib_hi == doctest::Approx(scan[i].hi).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("sublevel endpoints and midpoints respect the level") {
        auto g = SubordinationFunction::hermite_combo({0.5, 1.0, 0.0, 0.5});
        for (double x : {-2.0, 0.0, 1.0, 3.0}) {
            for (const auto& iv : g.sublevel(x)) {
                double lo = std::isinf(iv.lo) ? -12.0 : iv.lo;
                double hi = std::isinf(iv.hi) ? 12.0 : iv.hi;
                double mid = 0.5 * (lo + hi);
                CHECK(g(mid) <= x + 1e-9);
                if (!std::isinf(iv.lo)) CHECK(g(iv.lo) == doctest::Approx(x).epsilon(1e-6));
                if (!std::isinf(iv.hi)) CHECK(g(iv.hi) == doctest::Approx(x).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("custom monotone map inverts through the bracket") {
        auto g = SubordinationFunction::custom_monotone(
            [](double s) { return s * s * s + s; }, true, -2.0, 2.0);
        auto iv = g.sublevel(10.0);  // root of s^3 + s = 10 is s = 2
        REQUIRE(iv.size() == 1);
        CHECK(iv[0].hi == doctest::Approx(2.0).epsilon(1e-9));
        auto dec = SubordinationFunction::custom_monotone(
            [](double s) { return -s; }, false, -1.0, 1.0);
        auto div = dec.sublevel(-3.0);  // {-s <= -3} = [3, inf)
        REQUIRE(div.size() == 1);
        CHECK(div[0].lo == doctest::Approx(3.0).epsilon(1e-9));
    }
}
