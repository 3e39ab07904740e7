#include "doctest.h"

#include "qfboot/errors.hpp"
#include "qfboot/linalg.hpp"
#include "qfboot/reference_dist.hpp"
#include "qfboot/bootstrap.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace qfboot;

namespace {

// Integral of the chi-square density from 0 to x, with the density written
// out independently of the library.
double chisq_cdf_quadrature(int d, double x) {
    const double k = d / 2.0;
    const auto density = [k](double u) {
        if (u <= 0.0) {
            return 0.0;
        }
        return std::exp((k - 1.0) * std::log(u) - u / 2.0 - k * std::log(2.0) - std::lgamma(k));
    };
    // Substituting u = s^2 removes the 1/sqrt(u) singularity at d = 1.
    const auto integrand = [&](double s) { return 2.0 * s * density(s * s); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::sqrt(x), 15, 1e-14);
}

double bisect_quantile(int d, double alpha) {
    double lo = 0.0;
    double hi = 1.0;
    while (chisq_cdf_quadrature(d, hi) < alpha) {
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chisq_cdf_quadrature(d, mid) < alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("chisq_cdf closed forms and errors") {
    for (double x : {0.0, 0.3, 1.0, 5.0, 20.0}) {
        CHECK(std::abs(chisq_cdf(2, x) - (1.0 - std::exp(-x / 2.0))) <= 1e-12);
    }
    for (int d : {1, 3, 10, 60}) {
        CHECK(chisq_cdf(d, 0.0) == 0.0);
    }
    CHECK_THROWS_AS((void)chisq_cdf(3, -1.0), InvalidArgumentError);
    CHECK_THROWS_AS((void)chisq_cdf(0, 1.0), InvalidArgumentError);
}

TEST_CASE("chisq_cdf against quadrature") {
    CHECK(std::abs(chisq_cdf(3, 7.8147) - 0.95) <= 1e-4);
    for (int d : {1, 2, 3, 7, 20, 63}) {
        for (double x : {0.05, 0.5, 2.0, 7.8, 25.0, 60.0, 110.0}) {
            CAPTURE(d);
            CAPTURE(x);
            CHECK(std::abs(chisq_cdf(d, x) - chisq_cdf_quadrature(d, x)) <= 1e-10);
        }
    }
}

TEST_CASE("chisq_cdf is monotone") {
    for (int d : {1, 4, 30}) {
        double prev = 0.0;
        for (double x = 0.0; x < 100.0; x += 0.37) {
            const double c = chisq_cdf(d, x);
            CHECK(c >= prev);
            prev = c;
        }
    }
}

TEST_CASE("chisq_quantile") {
    for (double a : {0.1, 0.5, 0.9, 0.95, 0.99}) {
        CHECK(chisq_quantile(2, a) == doctest::Approx(-2.0 * std::log(1.0 - a)).epsilon(1e-10));
    }
    CHECK(std::abs(chisq_quantile(3, 0.95) - 7.8147) <= 1e-3);
    CHECK(std::abs(chisq_quantile(3, 0.95) - bisect_quantile(3, 0.95)) <= 1e-6);
    for (int d : {1, 3, 10, 60}) {
        double prev = 0.0;
        for (double a : {0.9, 0.95, 0.975, 0.99}) {
            const double q = chisq_quantile(d, a);
            CHECK(std::abs(chisq_cdf(d, q) - a) <= 1e-9);
            CHECK(q > prev);
            prev = q;
        }
    }
    CHECK(chisq_quantile(405, 0.99) > 405.0);
    CHECK_THROWS_AS((void)chisq_quantile(3, 0.0), InvalidArgumentError);
    CHECK_THROWS_AS((void)chisq_quantile(3, 1.0), InvalidArgumentError);
}

TEST_CASE("normal helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(-1.0) == doctest::Approx(0.158655253931457).epsilon(1e-12));
    CHECK(normal_quantile(normal_cdf(1.3)) == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)));
    CHECK_THROWS_AS((void)normal_quantile(1.0), InvalidArgumentError);
}

TEST_CASE("weighted_chisq_sample moments and errors") {
    const auto x = weighted_chisq_sample(std::vector<double>{2.0, 1.0}, 1000000, RngState{1, 0, 0});
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (const double v : x) {
        var += (v - mean) * (v - mean);
    }
    var /= n;
    CHECK(std::abs(mean - 3.0) <= 0.02);
    CHECK(std::abs(var - 10.0) <= 0.1);

    CHECK_THROWS_AS((void)weighted_chisq_sample(std::vector<double>{1.0, -0.5}, 10, RngState{}), InvalidArgumentError);
    CHECK_THROWS_AS((void)weighted_chisq_sample(std::vector<double>{}, 10, RngState{}), InvalidArgumentError);
    CHECK_THROWS_AS((void)weighted_chisq_sample(std::vector<double>{1.0}, 0, RngState{}), InvalidArgumentError);
}

TEST_CASE("weighted_chisq_sample scaling and thread independence") {
    const auto one = weighted_chisq_sample(std::vector<double>{1.0}, 10000, RngState{4, 0, 0});
    const auto three = weighted_chisq_sample(std::vector<double>{3.0}, 10000, RngState{4, 0, 0});
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(three[i] == doctest::Approx(3.0 * one[i]).epsilon(1e-15));
    }
    const std::vector<double> spec{2.0, 1.0, 0.5};
    CHECK(weighted_chisq_sample(spec, 20000, RngState{6, 0, 0}, 1) ==
          weighted_chisq_sample(spec, 20000, RngState{6, 0, 0}, 4));
}

TEST_CASE("normalized_stat") {
    CHECK(normalized_stat(3.0, SymMatrix::diagonal(Eigen::Vector2d(2.0, 1.0))) == doctest::Approx(0.0));
    const double d = 5.0;
    CHECK(normalized_stat(d + std::sqrt(2.0 * d), SymMatrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(normalized_stat(5.0, SymMatrix::diagonal(Eigen::Vector2d(2.0, 1.0))) ==
          doctest::Approx(2.0 / std::sqrt(10.0)).epsilon(1e-14));
    CHECK_THROWS_AS((void)normalized_stat(1.0, SymMatrix(Eigen::MatrixXd::Zero(2, 2))), InvalidArgumentError);

    const std::vector<double> spec{3.0, 1.0, 0.5, 0.5};
    const SymMatrix sigma = SymMatrix::diagonal(Eigen::Vector4d(3.0, 1.0, 0.5, 0.5));
    const auto draws = weighted_chisq_sample(spec, 1000000, RngState{12, 0, 0});
    double mean = 0.0;
    double sq = 0.0;
    for (const double q : draws) {
        const double z = normalized_stat(q, sigma);
        mean += z;
        sq += z * z;
    }
    mean /= static_cast<double>(draws.size());
    const double var = sq / static_cast<double>(draws.size()) - mean * mean;
    CHECK(std::abs(mean) <= 0.01);
    CHECK(std::abs(var - 1.0) <= 0.03);
}
