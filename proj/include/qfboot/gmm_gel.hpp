#pragma once

#include "qfboot/bootstrap.hpp"
#include "qfboot/linalg.hpp"
#include "qfboot/optimize.hpp"
#include "qfboot/rng.hpp"
#include "qfboot/sample.hpp"
#include "qfboot/weights.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qfboot {

/// g(x, theta) written into `out` (length d). Must be reentrant.
using MomentFn = std::function<void(std::span<const double> x, std::span<const double> theta, std::span<double> out)>;

/// Moment-condition model E[g(X, theta_0)] = 0 with theta in a box.
struct MomentModel {
    std::string name;
    std::size_t q = 0;  ///< parameter dimension
    std::size_t d = 0;  ///< number of moments, d >= q
    Box theta_bounds;
    MomentFn g;
    /// When true, g(x, theta) = g(x, 0) + sum_k theta_k (g(x, e_k) - g(x, 0))
    /// exactly, and sample averages are assembled from cached pieces.
    bool affine_in_theta = false;

    void validate() const;
};

/// n x d matrix with row i equal to g(X_i, theta).
[[nodiscard]] Eigen::MatrixXd moment_matrix(const MomentModel& model, const Sample& data,
                                            const Eigen::VectorXd& theta);

enum class GelKind { el, et, cue };

[[nodiscard]] GelKind parse_gel_kind(std::string_view token);

/// Concave GEL criterion s with s'(0) = s''(0) = -1.
struct GelKernel {
    GelKind kind = GelKind::cue;
    /// Arguments must stay strictly below this bound (1 for EL).
    double domain_upper = 0.0;

    [[nodiscard]] double s(double v) const noexcept;
    [[nodiscard]] double s1(double v) const noexcept;
    [[nodiscard]] double s2(double v) const noexcept;
};

[[nodiscard]] GelKernel kernel(GelKind kind);

enum class WeightMatrixKind { identity, two_step_inverse_omega, user };

struct GmmConfig {
    WeightMatrixKind weight_matrix = WeightMatrixKind::identity;
    std::optional<SymMatrix> user_matrix;
    OptimizerOptions optimizer;
};

struct EstimationResult {
    Eigen::VectorXd theta_hat;
    double objective_value = 0.0;
    double mst_stat = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    /// Weight matrix the final GMM stage used; empty for GEL.
    Eigen::MatrixXd weight_matrix;
};

/// (n^{-1} sum_i w_i g_i)^T W (n^{-1} sum_i w_i g_i); `w` empty means all ones.
[[nodiscard]] double gmm_objective(const MomentModel& model, const Sample& data, const Eigen::VectorXd& theta,
                                   const SymMatrix& weight, std::span<const double> w = {});

[[nodiscard]] EstimationResult gmm_estimate(const MomentModel& model, const Sample& data, const GmmConfig& config);

/// GMM with a fixed weight matrix and optional multipliers; the bootstrap path.
[[nodiscard]] EstimationResult gmm_estimate_with_matrix(const MomentModel& model, const Sample& data,
                                                        const SymMatrix& weight, std::span<const double> w,
                                                        const OptimizerOptions& optimizer = {});

/// (n^{-1} sum_i g_i g_i^T)^{-1} at theta; a ridge of 1e-10 tr/d is added when
/// the second moment is numerically singular.
[[nodiscard]] SymMatrix inverse_second_moment(const Eigen::MatrixXd& moments);

struct InnerSolution {
    Eigen::VectorXd lambda;
    double value = 0.0;  ///< sum_i s(lambda^T w_i g_i)
    bool converged = false;
    std::size_t iterations = 0;
    /// Newton decrement sqrt(grad^T (-H)^{-1} grad) at each accepted step.
    std::vector<double> decrements;
};

/// Damped Newton ascent on lambda -> sum_i s(lambda^T w_i g_i(theta)) from 0.
[[nodiscard]] InnerSolution gel_inner_solve(const MomentModel& model, const Sample& data, const Eigen::VectorXd& theta,
                                            const GelKernel& kern, std::span<const double> w = {});

/// Same solver on a precomputed n x d moment matrix.
[[nodiscard]] InnerSolution gel_inner_solve(const Eigen::MatrixXd& moments, const GelKernel& kern);

[[nodiscard]] EstimationResult gel_estimate(const MomentModel& model, const Sample& data, const GelKernel& kern,
                                            std::span<const double> w = {}, const OptimizerOptions& optimizer = {});

using MstMethod = std::variant<GmmConfig, GelKernel>;

/// Produces the multipliers for bootstrap replicate `rng.substream`.
using WeightDrawer = std::function<std::vector<double>(std::size_t n, const RngState& rng)>;

struct MstBootstrapResult {
    double stat = 0.0;
    double pvalue = 1.0;
    std::vector<double> quantiles;   ///< one per grid level
    std::vector<double> replicates;  ///< sorted T*_b
    std::size_t nonconverged = 0;
    bool stat_converged = false;
};

/// Bootstrap p-value of the model-specification statistic. Replicate b
/// (1-based) draws multipliers from rng.with_substream(b) and re-estimates
/// theta on the weighted criterion. Replicates within 1e-8 (1 + |T|) of T
/// count as ties. More than 5% non-converged replicates raises
/// ConvergenceError.
[[nodiscard]] MstBootstrapResult mst_bootstrap_pvalue(const MomentModel& model, const Sample& data,
                                                      const MstMethod& method, WeightScheme scheme, std::size_t reps,
                                                      const RngState& rng,
                                                      const QuantileGrid& grid = QuantileGrid::standard(),
                                                      std::size_t threads = 1);

/// Variant with a caller-supplied multiplier law.
[[nodiscard]] MstBootstrapResult mst_bootstrap_pvalue(const MomentModel& model, const Sample& data,
                                                      const MstMethod& method, const WeightDrawer& drawer,
                                                      std::size_t reps, const RngState& rng,
                                                      const QuantileGrid& grid = QuantileGrid::standard(),
                                                      std::size_t threads = 1);

}  // namespace qfboot
