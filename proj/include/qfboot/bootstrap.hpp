#pragma once

#include "qfboot/rng.hpp"
#include "qfboot/sample.hpp"
#include "qfboot/weights.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qfboot {

/// Strictly increasing probability levels in (0, 1).
class QuantileGrid {
public:
    explicit QuantileGrid(std::vector<double> levels);

    /// {0.900, 0.950, 0.975, 0.990}
    static QuantileGrid standard();

    [[nodiscard]] const std::vector<double>& levels() const noexcept { return levels_; }
    [[nodiscard]] std::size_t size() const noexcept { return levels_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return levels_[k]; }

private:
    std::vector<double> levels_;
};

/// Conditional law of Q*_n given the data, represented by B sorted replicates.
class BootstrapDistribution {
public:
    BootstrapDistribution(std::vector<double> replicates, WeightScheme scheme, RngState base);

    [[nodiscard]] const std::vector<double>& replicates() const noexcept { return replicates_; }
    [[nodiscard]] std::size_t size() const noexcept { return replicates_.size(); }
    [[nodiscard]] WeightScheme scheme() const noexcept { return scheme_; }
    [[nodiscard]] const RngState& base_state() const noexcept { return base_; }

private:
    std::vector<double> replicates_;
    WeightScheme scheme_;
    RngState base_;
};

/// B replicates of Q*_n; replicate b (1-based) draws its weights from
/// rng.with_substream(b). `threads` = 0 uses all hardware threads.
[[nodiscard]] BootstrapDistribution bootstrap_distribution(const Sample& sample, WeightScheme scheme, std::size_t reps,
                                                           const RngState& rng, std::size_t threads = 1);

/// Empirical inf-quantile: the ceil(alpha * B)-th order statistic.
[[nodiscard]] double bootstrap_quantile(const BootstrapDistribution& dist, double alpha);

/// Order statistic ceil(alpha * B) of an ascending array.
[[nodiscard]] double sorted_quantile(std::span<const double> sorted, double alpha);

/// (1 + #{replicates >= observed}) / (B + 1).
[[nodiscard]] double bootstrap_pvalue(const BootstrapDistribution& dist, double observed);
[[nodiscard]] double sorted_pvalue(std::span<const double> sorted, double observed);

/// Per level a: |#{r : stats[r] >= thresholds[r][k]} / R - (1 - a)|.
/// thresholds[r] holds one critical value per grid level.
[[nodiscard]] std::vector<double> coverage_errors(std::span<const double> mc_stats,
                                                  const std::vector<std::vector<double>>& thresholds,
                                                  const QuantileGrid& grid);

/// max over the grid of coverage_errors.
[[nodiscard]] double coverage_discrepancy(std::span<const double> mc_stats,
                                          const std::vector<std::vector<double>>& thresholds,
                                          const QuantileGrid& grid);

}  // namespace qfboot
