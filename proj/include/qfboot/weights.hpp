#pragma once

#include "qfboot/rng.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qfboot {

/// Law of the bootstrap multipliers. Every kind has mean 0 and variance 1.
enum class WeightScheme {
    gaussian,           ///< N(0, 1)
    uniform_scaled,     ///< sqrt(12) * U(-1/2, 1/2), support [-sqrt(3), sqrt(3)]
    student_t3_scaled,  ///< t_3 / sqrt(3); no finite fourth moment
};

/// Parses "gaussian", "uniform" or "t3".
[[nodiscard]] WeightScheme parse_weight_scheme(std::string_view token);
[[nodiscard]] std::string to_string(WeightScheme scheme);

struct SchemeMoments {
    double mean;
    double variance;
    double third;
    double fourth;  ///< +infinity when the moment does not exist
};

[[nodiscard]] SchemeMoments scheme_moments(WeightScheme scheme) noexcept;

/// n iid multipliers from the stream addressed by `rng`.
[[nodiscard]] std::vector<double> draw_weights(WeightScheme scheme, std::size_t n, const RngState& rng);

/// Same as draw_weights but fills `out` (its size is n) with an existing engine.
void fill_weights(WeightScheme scheme, Engine& engine, std::vector<double>& out);

}  // namespace qfboot
