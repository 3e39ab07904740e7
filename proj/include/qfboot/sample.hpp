#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <istream>

namespace qfboot {

/// n x d array of observations, one row per Z_i. Every entry is finite and
/// both dimensions are positive.
class Sample {
public:
    explicit Sample(Eigen::MatrixXd values);

    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t d() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    [[nodiscard]] Eigen::VectorXd row(std::size_t i) const {
        return values_.row(static_cast<Eigen::Index>(i)).transpose();
    }

private:
    Eigen::MatrixXd values_;
};

/// Reads comma-separated numeric rows. A first line whose leading field is
/// not a number is taken as a header and skipped. Blank lines are ignored.
[[nodiscard]] Sample read_csv_sample(std::istream& in);
[[nodiscard]] Sample read_csv_sample(const std::filesystem::path& path);

}  // namespace qfboot
