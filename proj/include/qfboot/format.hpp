#pragma once

#include <string>

namespace qfboot {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite input.
[[nodiscard]] std::string format_double(double x);

/// Fixed notation with `digits` decimals.
[[nodiscard]] std::string format_fixed(double x, int digits);

}  // namespace qfboot
