#include "qfboot/reference_dist.hpp"

#include "qfboot/errors.hpp"
#include "qfboot/parallel.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qfboot {

namespace {

void check_dof(int d) {
    if (d < 1) {
        throw InvalidArgumentError("degrees of freedom must be >= 1, got " + std::to_string(d));
    }
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) {
        throw InvalidArgumentError("regularized_gamma_p requires a > 0");
    }
    if (x < 0.0 || std::isnan(x)) {
        throw InvalidArgumentError("regularized_gamma_p requires x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    return boost::math::gamma_p(a, x);
}

double chisq_cdf(int d, double x) {
    check_dof(d);
    if (x < 0.0 || std::isnan(x)) {
        throw InvalidArgumentError("chisq_cdf requires x >= 0, got " + std::to_string(x));
    }
    return regularized_gamma_p(0.5 * d, 0.5 * x);
}

double chisq_pdf(int d, double x) {
    check_dof(d);
    if (x < 0.0) {
        return 0.0;
    }
    const double k = 0.5 * d;
    if (x == 0.0) {
        return d == 2 ? 0.5 : (d < 2 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - std::lgamma(k));
}

double chisq_quantile(int d, double alpha) {
    check_dof(d);
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgumentError("chisq_quantile requires alpha in (0,1), got " + std::to_string(alpha));
    }
    auto f = [&](double x) { return chisq_cdf(d, x) - alpha; };
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(d));
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    boost::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        f, lo, hi, f(lo), f(hi), boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (bracket.first + bracket.second);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgumentError("normal_quantile requires p in (0,1)");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

std::vector<double> weighted_chisq_sample(std::span<const double> spectrum, std::size_t m, const RngState& rng,
                                          std::size_t threads) {
    if (spectrum.empty()) {
        throw InvalidArgumentError("weighted_chisq_sample needs a nonempty spectrum");
    }
    for (const double lambda : spectrum) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw InvalidArgumentError("weighted_chisq_sample requires finite nonnegative weights");
        }
    }
    if (m == 0) {
        throw InvalidArgumentError("weighted_chisq_sample requires m >= 1");
    }
    std::vector<double> out(m);
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        Engine engine = make_engine(rng.with_substream(c));
        boost::random::normal_distribution<double> normal;
        const std::size_t end = std::min(m, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            double acc = 0.0;
            for (const double lambda : spectrum) {
                const double z = normal(engine);
                acc += lambda * z * z;
            }
            out[i] = acc;
        }
    });
    return out;
}

double normalized_stat(double q, const SymMatrix& sigma) {
    const double tr2 = trace_power(sigma, 2);
    if (!(tr2 > 0.0)) {
        throw InvalidArgumentError("normalized_stat: tr(Sigma^2) must be positive");
    }
    return (q - trace_power(sigma, 1)) / std::sqrt(2.0 * tr2);
}

}  // namespace qfboot
