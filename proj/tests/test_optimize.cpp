#include "doctest.h"

#include "qfboot/errors.hpp"
#include "qfboot/optimize.hpp"

#include <cmath>
#include <limits>

using namespace qfboot;

TEST_CASE("minimize_scalar finds interior and boundary minima") {
    const auto r = minimize_scalar([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -1.0, 1.0);
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(r.value == doctest::Approx(1.0));

    const auto edge = minimize_scalar([](double x) { return x; }, -2.0, 5.0);
    CHECK(edge.x(0) == doctest::Approx(-2.0).epsilon(1e-9));

    const auto upper = minimize_scalar([](double x) { return -x; }, -2.0, 5.0);
    CHECK(upper.x(0) == doctest::Approx(5.0).epsilon(1e-9));

    const auto point = minimize_scalar([](double x) { return x * x; }, 2.0, 2.0);
    CHECK(point.x(0) == 2.0);
    CHECK_THROWS_AS((void)minimize_scalar([](double x) { return x; }, 1.0, 0.0), InvalidArgumentError);
}

TEST_CASE("minimize_scalar treats non-finite values as +infinity") {
    const auto r = minimize_scalar(
        [](double x) { return x < 0.0 ? std::numeric_limits<double>::quiet_NaN() : (x - 0.5) * (x - 0.5); }, -1.0,
        1.0);
    CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("minimize_scalar picks the global basin of a multimodal function") {
    const auto f = [](double x) { return std::sin(8.0 * x) + 0.1 * x * x; };
    // Basins are 0.79 wide, so the pre-scan needs a finer grid than the default.
    OptimizerOptions opts;
    opts.grid_points = 401;
    const auto r = minimize_scalar(f, -3.0, 3.0, opts);
    double best = 1e9;
    for (double x = -3.0; x <= 3.0; x += 1e-5) {
        best = std::min(best, f(x));
    }
    CHECK(r.value <= best + 1e-9);
}

TEST_CASE("nelder_mead_box on quadratics and the Rosenbrock valley") {
    const Box box{Eigen::Vector2d(-2.0, -2.0), Eigen::Vector2d(2.0, 2.0)};
    const auto quad = nelder_mead_box(
        [](const Eigen::VectorXd& x) { return (x(0) - 0.5) * (x(0) - 0.5) + 3.0 * (x(1) + 1.0) * (x(1) + 1.0); }, box);
    CHECK(quad.converged);
    CHECK(quad.x(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(quad.x(1) == doctest::Approx(-1.0).epsilon(1e-6));

    const auto rosen = nelder_mead_box(
        [](const Eigen::VectorXd& x) {
            return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
        },
        box);
    CHECK(rosen.value < 1e-10);
    CHECK(rosen.x(0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("nelder_mead_box respects the box") {
    const Box box{Eigen::Vector3d(0.0, 0.0, 0.0), Eigen::Vector3d(1.0, 1.0, 1.0)};
    const auto r = nelder_mead_box([](const Eigen::VectorXd& x) { return x.sum(); }, box);
    CHECK(r.x.minCoeff() >= 0.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-9));

    const auto deterministic = nelder_mead_box([](const Eigen::VectorXd& x) { return x.squaredNorm(); }, box);
    const auto again = nelder_mead_box([](const Eigen::VectorXd& x) { return x.squaredNorm(); }, box);
    CHECK(deterministic.x == again.x);

    CHECK_THROWS_AS((void)nelder_mead_box([](const Eigen::VectorXd&) { return 0.0; },
                                          Box{Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.0, 2.0)}),
                    InvalidArgumentError);
    CHECK_THROWS_AS((void)nelder_mead_box([](const Eigen::VectorXd&) { return 0.0; },
                                          Box{Eigen::VectorXd(0), Eigen::VectorXd(0)}),
                    DimensionError);
}

TEST_CASE("minimize_box dispatches on dimension") {
    const Box one{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
    const auto r = minimize_box([](const Eigen::VectorXd& x) { return std::abs(x(0) - 0.25); }, one);
    CHECK(r.x(0) == doctest::Approx(0.25).epsilon(1e-9));
}
