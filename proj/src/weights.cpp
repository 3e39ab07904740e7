#include "qfboot/weights.hpp"

#include "qfboot/errors.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <limits>

namespace qfboot {

WeightScheme parse_weight_scheme(std::string_view token) {
    if (token == "gaussian") {
        return WeightScheme::gaussian;
    }
    if (token == "uniform") {
        return WeightScheme::uniform_scaled;
    }
    if (token == "t3") {
        return WeightScheme::student_t3_scaled;
    }
    throw InvalidArgumentError("unknown weight scheme '" + std::string(token) + "' (expected gaussian|uniform|t3)");
}

std::string to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::gaussian:
            return "gaussian";
        case WeightScheme::uniform_scaled:
            return "uniform";
        case WeightScheme::student_t3_scaled:
            return "t3";
    }
    return "unknown";
}

SchemeMoments scheme_moments(WeightScheme scheme) noexcept {
    switch (scheme) {
        case WeightScheme::gaussian:
            return {0.0, 1.0, 0.0, 3.0};
        case WeightScheme::uniform_scaled:
            // E[(sqrt(12) U)^4] = 144 * E[U^4] = 144 / 80
            return {0.0, 1.0, 0.0, 1.8};
        case WeightScheme::student_t3_scaled:
            return {0.0, 1.0, 0.0, std::numeric_limits<double>::infinity()};
    }
    return {0.0, 1.0, 0.0, 0.0};
}

void fill_weights(WeightScheme scheme, Engine& engine, std::vector<double>& out) {
    switch (scheme) {
        case WeightScheme::gaussian: {
            boost::random::normal_distribution<double> normal;
            for (auto& w : out) {
                w = normal(engine);
            }
            return;
        }
        case WeightScheme::uniform_scaled: {
            const double half_width = std::sqrt(3.0);
            boost::random::uniform_real_distribution<double> uniform(-half_width, half_width);
            for (auto& w : out) {
                w = uniform(engine);
            }
            return;
        }
        case WeightScheme::student_t3_scaled: {
            // t_3 = N / sqrt(chi2_3 / 3), so t_3 / sqrt(3) = N / sqrt(chi2_3).
            boost::random::normal_distribution<double> normal;
            for (auto& w : out) {
                const double num = normal(engine);
                const double a = normal(engine);
                const double b = normal(engine);
                const double c = normal(engine);
                w = num / std::sqrt(a * a + b * b + c * c);
            }
            return;
        }
    }
}

std::vector<double> draw_weights(WeightScheme scheme, std::size_t n, const RngState& rng) {
    if (n == 0) {
        throw InvalidArgumentError("draw_weights requires n >= 1");
    }
    std::vector<double> out(n);
    Engine engine = make_engine(rng);
    fill_weights(scheme, engine, out);
    return out;
}

}  // namespace qfboot
