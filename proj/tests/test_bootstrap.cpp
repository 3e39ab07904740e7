#include "doctest.h"
#include "test_util.hpp"

#include "qfboot/bootstrap.hpp"
#include "qfboot/errors.hpp"
#include "qfboot/reference_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace qfboot;

namespace {

BootstrapDistribution from_values(std::vector<double> v) {
    return BootstrapDistribution(std::move(v), WeightScheme::gaussian, RngState{});
}

}  // namespace

TEST_CASE("QuantileGrid validation") {
    CHECK(QuantileGrid::standard().levels() == std::vector<double>{0.9, 0.95, 0.975, 0.99});
    CHECK_THROWS_AS(QuantileGrid({}), InvalidArgumentError);
    CHECK_THROWS_AS(QuantileGrid({0.5, 0.5}), InvalidArgumentError);
    CHECK_THROWS_AS(QuantileGrid({0.9, 0.5}), InvalidArgumentError);
    CHECK_THROWS_AS(QuantileGrid({0.0}), InvalidArgumentError);
    CHECK_THROWS_AS(QuantileGrid({1.0}), InvalidArgumentError);
}

TEST_CASE("bootstrap_distribution basic cases") {
    CHECK_THROWS_AS((void)bootstrap_distribution(Sample(Eigen::MatrixXd::Ones(3, 2)), WeightScheme::gaussian, 0,
                                                 RngState{}),
                    InvalidArgumentError);

    const auto zero = bootstrap_distribution(Sample(Eigen::MatrixXd::Zero(10, 3)), WeightScheme::uniform_scaled, 50,
                                             RngState{1, 0, 0});
    for (const double r : zero.replicates()) {
        CHECK(r == 0.0);
    }

    // n = 1: replicate b is w_b^2 ||Z_1||^2 with w_b from substream b (1-based).
    Eigen::MatrixXd one(1, 2);
    one << 3.0, 4.0;
    const RngState base{17, 2, 0};
    for (auto scheme : {WeightScheme::gaussian, WeightScheme::uniform_scaled, WeightScheme::student_t3_scaled}) {
        const auto dist = bootstrap_distribution(Sample(one), scheme, 40, base);
        std::vector<double> expected;
        for (std::size_t b = 1; b <= 40; ++b) {
            const double w = draw_weights(scheme, 1, base.with_substream(b))[0];
            expected.push_back(w * w * 25.0);
        }
        std::sort(expected.begin(), expected.end());
        for (std::size_t b = 0; b < 40; ++b) {
            CHECK(dist.replicates()[b] == doctest::Approx(expected[b]).epsilon(1e-14));
        }
        CHECK(dist.scheme() == scheme);
        CHECK(dist.base_state() == base);
    }
}

TEST_CASE("bootstrap_distribution is deterministic across reruns and threads") {
    std::mt19937_64 gen(4);
    const Sample s(testutil::random_matrix(gen, 50, 2));
    const auto a = bootstrap_distribution(s, WeightScheme::gaussian, 100, RngState{5, 0, 0});
    const auto b = bootstrap_distribution(s, WeightScheme::gaussian, 100, RngState{5, 0, 0});
    CHECK(a.replicates() == b.replicates());
    for (std::size_t threads : {2, 3, 8}) {
        CHECK(bootstrap_distribution(s, WeightScheme::gaussian, 300, RngState{5, 0, 0}, threads).replicates() ==
              bootstrap_distribution(s, WeightScheme::gaussian, 300, RngState{5, 0, 0}, 1).replicates());
    }
    CHECK(std::is_sorted(a.replicates().begin(), a.replicates().end()));
}

TEST_CASE("scale equivariance") {
    std::mt19937_64 gen(8);
    const Eigen::MatrixXd z = testutil::random_matrix(gen, 30, 3);
    const auto base = bootstrap_distribution(Sample(z), WeightScheme::uniform_scaled, 64, RngState{2, 0, 0});
    const auto scaled = bootstrap_distribution(Sample(2.0 * z), WeightScheme::uniform_scaled, 64, RngState{2, 0, 0});
    for (std::size_t b = 0; b < 64; ++b) {
        CHECK(scaled.replicates()[b] == 4.0 * base.replicates()[b]);
    }
}

TEST_CASE("bootstrap_quantile examples") {
    const auto d = from_values({4, 2, 1, 3});
    CHECK(bootstrap_quantile(d, 0.5) == 2.0);
    CHECK(bootstrap_quantile(d, 0.9) == 4.0);
    CHECK(bootstrap_quantile(d, 0.25) == 1.0);
    CHECK(bootstrap_quantile(d, 0.2500001) == 2.0);
    CHECK_THROWS_AS((void)bootstrap_quantile(d, 0.0), InvalidArgumentError);
    CHECK_THROWS_AS((void)bootstrap_quantile(d, 1.0), InvalidArgumentError);

    // 0.95 * 100 lands on 95 only up to rounding.
    std::vector<double> hundred(100);
    for (int i = 0; i < 100; ++i) {
        hundred[static_cast<std::size_t>(i)] = i + 1;
    }
    const auto h = from_values(hundred);
    CHECK(bootstrap_quantile(h, 0.95) == 95.0);
    CHECK(bootstrap_quantile(h, 0.9) == 90.0);
    CHECK(bootstrap_quantile(h, 0.99) == 99.0);
}

TEST_CASE("chi-square distributed replicates give the chi-square quantile") {
    auto draws = weighted_chisq_sample(std::vector<double>{1.0, 1.0, 1.0}, 100000, RngState{3, 0, 0});
    const auto d = from_values(std::move(draws));
    CHECK(std::abs(bootstrap_quantile(d, 0.95) - 7.815) <= 0.1);
}

TEST_CASE("bootstrap_pvalue examples") {
    std::vector<double> v(99);
    for (int i = 0; i < 99; ++i) {
        v[static_cast<std::size_t>(i)] = i;
    }
    const auto d = from_values(v);
    CHECK(bootstrap_pvalue(d, -1.0) == 1.0);
    CHECK(bootstrap_pvalue(d, 1000.0) == doctest::Approx(1.0 / 100.0));
    CHECK(bootstrap_pvalue(d, 49.0) == doctest::Approx(51.0 / 100.0));
    CHECK_THROWS_AS((void)bootstrap_pvalue(d, std::numeric_limits<double>::quiet_NaN()), InvalidArgumentError);
}

TEST_CASE("quantile monotonicity and p-value duality") {
    std::mt19937_64 gen(14);
    const Sample s(testutil::random_matrix(gen, 40, 4));
    const auto dist = bootstrap_distribution(s, WeightScheme::gaussian, 999, RngState{8, 0, 0});
    double prev = -1.0;
    for (double a = 0.01; a < 1.0; a += 0.01) {
        const double q = bootstrap_quantile(dist, a);
        CHECK(q >= prev);
        prev = q;
        const double b = static_cast<double>(dist.size());
        CHECK(bootstrap_pvalue(dist, q) <= 1.0 - a + 2.0 / (b + 1.0));
    }
}

TEST_CASE("coverage discrepancy") {
    const QuantileGrid grid = QuantileGrid::standard();
    std::vector<double> stats(1000);
    for (std::size_t r = 0; r < stats.size(); ++r) {
        stats[r] = static_cast<double>(r);
    }
    // Quantiles of the statistics' own empirical law.
    std::vector<double> row;
    for (const double a : grid.levels()) {
        row.push_back(sorted_quantile(stats, a));
    }
    const std::vector<std::vector<double>> own(stats.size(), row);
    CHECK(coverage_discrepancy(stats, own, grid) <= 1.0 / 1000.0 + 1e-12);

    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<std::vector<double>> never(stats.size(), std::vector<double>(4, inf));
    CHECK(coverage_discrepancy(stats, never, grid) == doctest::Approx(0.10));
    const auto errs = coverage_errors(stats, never, grid);
    CHECK(errs[3] == doctest::Approx(0.01));

    CHECK_THROWS_AS((void)coverage_discrepancy(stats, std::vector<std::vector<double>>(3, row), grid), DimensionError);
    CHECK_THROWS_AS((void)coverage_discrepancy(std::vector<double>{1.0},
                                               std::vector<std::vector<double>>{{1.0, 2.0}}, grid),
                    DimensionError);
}
