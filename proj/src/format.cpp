#include "qfboot/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace qfboot {

namespace {

std::string non_finite(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_double(double x) {
    if (!std::isfinite(x)) {
        return non_finite(x);
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double x, int digits) {
    if (!std::isfinite(x)) {
        return non_finite(x);
    }
    std::array<char, 128> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, digits);
    return std::string(buf.data(), res.ptr);
}

}  // namespace qfboot
