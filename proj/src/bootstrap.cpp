#include "qfboot/bootstrap.hpp"

#include "qfboot/errors.hpp"
#include "qfboot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfboot {

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw InvalidArgumentError("quantile grid must not be empty");
    }
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        if (!(levels_[k] > 0.0 && levels_[k] < 1.0)) {
            throw InvalidArgumentError("quantile level " + std::to_string(levels_[k]) + " is outside (0,1)");
        }
        if (k > 0 && !(levels_[k] > levels_[k - 1])) {
            throw InvalidArgumentError("quantile levels must be strictly increasing");
        }
    }
}

QuantileGrid QuantileGrid::standard() { return QuantileGrid({0.900, 0.950, 0.975, 0.990}); }

BootstrapDistribution::BootstrapDistribution(std::vector<double> replicates, WeightScheme scheme, RngState base)
    : replicates_(std::move(replicates)), scheme_(scheme), base_(base) {
    if (replicates_.empty()) {
        throw InvalidArgumentError("bootstrap distribution needs at least one replicate");
    }
    for (const double r : replicates_) {
        if (!std::isfinite(r) || r < 0.0) {
            throw InvalidInputError("bootstrap replicates must be finite and nonnegative");
        }
    }
    std::sort(replicates_.begin(), replicates_.end());
}

BootstrapDistribution bootstrap_distribution(const Sample& sample, WeightScheme scheme, std::size_t reps,
                                             const RngState& rng, std::size_t threads) {
    if (reps == 0) {
        throw InvalidArgumentError("bootstrap_distribution requires B >= 1");
    }
    const Eigen::MatrixXd& z = sample.values();
    const double n = static_cast<double>(sample.n());
    std::vector<double> replicates(reps);

    constexpr std::size_t kChunk = 64;
    const std::size_t chunks = (reps + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(reps, begin + kChunk);
        Eigen::MatrixXd weights(z.rows(), static_cast<Eigen::Index>(end - begin));
        std::vector<double> w(sample.n());
        for (std::size_t b = begin; b < end; ++b) {
            Engine engine = make_engine(rng.with_substream(b + 1));
            fill_weights(scheme, engine, w);
            weights.col(static_cast<Eigen::Index>(b - begin)) =
                Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
        }
        const Eigen::MatrixXd sums = z.transpose() * weights;
        for (std::size_t b = begin; b < end; ++b) {
            replicates[b] = sums.col(static_cast<Eigen::Index>(b - begin)).squaredNorm() / n;
        }
    });
    return BootstrapDistribution(std::move(replicates), scheme, rng);
}

double sorted_quantile(std::span<const double> sorted, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgumentError("quantile level must lie in (0,1), got " + std::to_string(alpha));
    }
    if (sorted.empty()) {
        throw InvalidArgumentError("quantile of an empty array");
    }
    const double b = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(alpha * b));
    // guard against alpha * B landing a hair above an integer through rounding
    if (rank > 1 && static_cast<double>(rank - 1) >= alpha * b * (1.0 - 1e-15)) {
        --rank;
    }
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double bootstrap_quantile(const BootstrapDistribution& dist, double alpha) {
    return sorted_quantile(dist.replicates(), alpha);
}

double sorted_pvalue(std::span<const double> sorted, double observed) {
    if (!std::isfinite(observed)) {
        throw InvalidArgumentError("observed statistic must be finite");
    }
    const auto first_ge = std::lower_bound(sorted.begin(), sorted.end(), observed);
    const auto exceed = static_cast<double>(std::distance(first_ge, sorted.end()));
    return (1.0 + exceed) / (static_cast<double>(sorted.size()) + 1.0);
}

double bootstrap_pvalue(const BootstrapDistribution& dist, double observed) {
    return sorted_pvalue(dist.replicates(), observed);
}

std::vector<double> coverage_errors(std::span<const double> mc_stats,
                                    const std::vector<std::vector<double>>& thresholds, const QuantileGrid& grid) {
    if (thresholds.size() != mc_stats.size()) {
        throw DimensionError("coverage_errors: " + std::to_string(mc_stats.size()) + " statistics but " +
                             std::to_string(thresholds.size()) + " threshold rows");
    }
    if (mc_stats.empty()) {
        throw DimensionError("coverage_errors: no Monte Carlo replications");
    }
    std::vector<std::size_t> exceed(grid.size(), 0);
    for (std::size_t r = 0; r < mc_stats.size(); ++r) {
        if (thresholds[r].size() != grid.size()) {
            throw DimensionError("coverage_errors: threshold row " + std::to_string(r) + " has " +
                                 std::to_string(thresholds[r].size()) + " levels, grid has " +
                                 std::to_string(grid.size()));
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (mc_stats[r] >= thresholds[r][k]) {
                ++exceed[k];
            }
        }
    }
    std::vector<double> errors(grid.size());
    const double reps = static_cast<double>(mc_stats.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        errors[k] = std::abs(static_cast<double>(exceed[k]) / reps - (1.0 - grid[k]));
    }
    return errors;
}

double coverage_discrepancy(std::span<const double> mc_stats, const std::vector<std::vector<double>>& thresholds,
                            const QuantileGrid& grid) {
    const auto errors = coverage_errors(mc_stats, thresholds, grid);
    return *std::max_element(errors.begin(), errors.end());
}

}  // namespace qfboot
