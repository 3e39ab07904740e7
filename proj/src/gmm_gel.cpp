#include "qfboot/gmm_gel.hpp"

#include "qfboot/errors.hpp"
#include "qfboot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qfboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxNewtonIterations = 200;
constexpr double kArmijo = 1e-4;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-major copy of the observations plus, for affine models, the cached
// intercept and slope matrices.
class PreparedMoments {
public:
    PreparedMoments(const MomentModel& model, const Sample& data) : model_(model), obs_(data.values()) {
        model.validate();
        if (model.affine_in_theta) {
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.q));
            intercept_ = evaluate(zero);
            for (std::size_t k = 0; k < model.q; ++k) {
                Eigen::VectorXd e = zero;
                e(static_cast<Eigen::Index>(k)) = 1.0;
                slopes_.push_back(evaluate(e) - intercept_);
            }
        }
    }

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(obs_.rows()); }
    [[nodiscard]] const MomentModel& model() const noexcept { return model_; }
    [[nodiscard]] bool affine() const noexcept { return model_.affine_in_theta; }
    [[nodiscard]] const Eigen::MatrixXd& intercept() const noexcept { return intercept_; }
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& slopes() const noexcept { return slopes_; }

    [[nodiscard]] Eigen::MatrixXd matrix(const Eigen::VectorXd& theta) const {
        if (!affine()) {
            return evaluate(theta);
        }
        Eigen::MatrixXd out = intercept_;
        for (std::size_t k = 0; k < slopes_.size(); ++k) {
            out += theta(static_cast<Eigen::Index>(k)) * slopes_[k];
        }
        return out;
    }

private:
    [[nodiscard]] Eigen::MatrixXd evaluate(const Eigen::VectorXd& theta) const {
        const auto d = static_cast<Eigen::Index>(model_.d);
        RowMatrix out(obs_.rows(), d);
        const std::span<const double> th(theta.data(), static_cast<std::size_t>(theta.size()));
        for (Eigen::Index i = 0; i < obs_.rows(); ++i) {
            model_.g(std::span<const double>(obs_.row(i).data(), static_cast<std::size_t>(obs_.cols())), th,
                     std::span<double>(out.row(i).data(), model_.d));
        }
        if (!out.allFinite()) {
            throw InvalidInputError("moment function returned non-finite values for model " + model_.name);
        }
        return out;
    }

    const MomentModel& model_;
    RowMatrix obs_;
    Eigen::MatrixXd intercept_;
    std::vector<Eigen::MatrixXd> slopes_;
};

// theta -> n^{-1} sum_i w_i g(X_i, theta)
class WeightedMean {
public:
    WeightedMean(const PreparedMoments& prepared, std::span<const double> w) : prepared_(prepared) {
        const auto n = prepared.n();
        if (!w.empty() && w.size() != n) {
            throw DimensionError("weights have length " + std::to_string(w.size()) + ", data has n = " +
                                 std::to_string(n));
        }
        if (w.empty()) {
            weights_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
        } else {
            weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        if (prepared.affine()) {
            intercept_mean_ = prepared.intercept().transpose() * weights_ * inv_n;
            slope_means_.resize(intercept_mean_.size(), static_cast<Eigen::Index>(prepared.slopes().size()));
            for (std::size_t k = 0; k < prepared.slopes().size(); ++k) {
                slope_means_.col(static_cast<Eigen::Index>(k)) = prepared.slopes()[k].transpose() * weights_ * inv_n;
            }
        }
    }

    [[nodiscard]] Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const {
        if (prepared_.affine()) {
            return intercept_mean_ + slope_means_ * theta;
        }
        return prepared_.matrix(theta).transpose() * weights_ / static_cast<double>(prepared_.n());
    }

    /// Rows w_i g(X_i, theta).
    [[nodiscard]] Eigen::MatrixXd weighted_matrix(const Eigen::VectorXd& theta) const {
        return weights_.asDiagonal() * prepared_.matrix(theta);
    }

private:
    const PreparedMoments& prepared_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd intercept_mean_;
    Eigen::MatrixXd slope_means_;
};

void check_weight_matrix(const MomentModel& model, const SymMatrix& weight) {
    if (weight.dim() != model.d) {
        throw DimensionError("weight matrix is " + std::to_string(weight.dim()) + "x" + std::to_string(weight.dim()) +
                             " but the model has d = " + std::to_string(model.d));
    }
}

EstimationResult gmm_minimize(const PreparedMoments& prepared, const SymMatrix& weight, std::span<const double> w,
                              const OptimizerOptions& optimizer) {
    const WeightedMean mean(prepared, w);
    const Eigen::MatrixXd& wm = weight.matrix();
    const auto objective = [&](const Eigen::VectorXd& theta) {
        const Eigen::VectorXd g = mean(theta);
        return g.dot(wm * g);
    };
    const MinimizeResult min = minimize_box(objective, prepared.model().theta_bounds, optimizer);
    EstimationResult out;
    out.theta_hat = min.x;
    out.objective_value = std::max(min.value, 0.0);
    out.mst_stat = static_cast<double>(prepared.n()) * out.objective_value;
    out.converged = min.converged;
    out.iterations = min.iterations;
    out.weight_matrix = wm;
    return out;
}

EstimationResult gel_minimize(const PreparedMoments& prepared, const GelKernel& kern, std::span<const double> w,
                              const OptimizerOptions& optimizer) {
    const WeightedMean mean(prepared, w);
    const auto inner_value = [&](const Eigen::VectorXd& theta) {
        const InnerSolution inner = gel_inner_solve(mean.weighted_matrix(theta), kern);
        return inner.converged ? inner.value : kInf;
    };
    const MinimizeResult min = minimize_box(inner_value, prepared.model().theta_bounds, optimizer);
    const InnerSolution at_min = gel_inner_solve(mean.weighted_matrix(min.x), kern);
    const double n = static_cast<double>(prepared.n());
    EstimationResult out;
    out.theta_hat = min.x;
    out.objective_value = at_min.value;
    out.mst_stat = 2.0 * (at_min.value - n * kern.s(0.0));
    out.converged = min.converged && at_min.converged;
    out.iterations = min.iterations;
    return out;
}

}  // namespace

void MomentModel::validate() const {
    if (q == 0 || d == 0) {
        throw InvalidArgumentError("moment model '" + name + "' needs q >= 1 and d >= 1");
    }
    if (d < q) {
        throw InvalidArgumentError("moment model '" + name + "' is underidentified (d < q)");
    }
    if (theta_bounds.dim() != static_cast<Eigen::Index>(q) || theta_bounds.upper.size() != theta_bounds.lower.size()) {
        throw DimensionError("moment model '" + name + "' has parameter bounds of the wrong length");
    }
    if (((theta_bounds.upper - theta_bounds.lower).array() < 0.0).any()) {
        throw InvalidArgumentError("moment model '" + name + "' has an empty parameter box");
    }
    if (!g) {
        throw InvalidArgumentError("moment model '" + name + "' has no moment function");
    }
}

Eigen::MatrixXd moment_matrix(const MomentModel& model, const Sample& data, const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(model.q)) {
        throw DimensionError("theta has length " + std::to_string(theta.size()) + ", model expects q = " +
                             std::to_string(model.q));
    }
    return PreparedMoments(model, data).matrix(theta);
}

GelKind parse_gel_kind(std::string_view token) {
    if (token == "el") {
        return GelKind::el;
    }
    if (token == "et") {
        return GelKind::et;
    }
    if (token == "cue") {
        return GelKind::cue;
    }
    throw InvalidArgumentError("unknown GEL kernel '" + std::string(token) + "' (expected el|et|cue)");
}

double GelKernel::s(double v) const noexcept {
    switch (kind) {
        case GelKind::el:
            return v < 1.0 ? std::log1p(-v) : -kInf;
        case GelKind::et:
            return -std::exp(v);
        case GelKind::cue:
            return -0.5 * (1.0 + v) * (1.0 + v);
    }
    return 0.0;
}

double GelKernel::s1(double v) const noexcept {
    switch (kind) {
        case GelKind::el:
            return -1.0 / (1.0 - v);
        case GelKind::et:
            return -std::exp(v);
        case GelKind::cue:
            return -(1.0 + v);
    }
    return 0.0;
}

double GelKernel::s2(double v) const noexcept {
    switch (kind) {
        case GelKind::el:
            return -1.0 / ((1.0 - v) * (1.0 - v));
        case GelKind::et:
            return -std::exp(v);
        case GelKind::cue:
            return -1.0;
    }
    return 0.0;
}

GelKernel kernel(GelKind kind) {
    switch (kind) {
        case GelKind::el:
            return GelKernel{GelKind::el, 1.0};
        case GelKind::et:
            return GelKernel{GelKind::et, kInf};
        case GelKind::cue:
            return GelKernel{GelKind::cue, kInf};
    }
    throw InvalidArgumentError("unknown GEL kernel");
}

double gmm_objective(const MomentModel& model, const Sample& data, const Eigen::VectorXd& theta,
                     const SymMatrix& weight, std::span<const double> w) {
    check_weight_matrix(model, weight);
    if (theta.size() != static_cast<Eigen::Index>(model.q)) {
        throw DimensionError("theta has length " + std::to_string(theta.size()) + ", model expects q = " +
                             std::to_string(model.q));
    }
    const PreparedMoments prepared(model, data);
    const Eigen::VectorXd g = WeightedMean(prepared, w)(theta);
    return g.dot(weight.matrix() * g);
}

SymMatrix inverse_second_moment(const Eigen::MatrixXd& moments) {
    const auto n = static_cast<double>(moments.rows());
    Eigen::MatrixXd omega = moments.transpose() * moments / n;
    Spectrum spectrum = sym_eigen(0.5 * (omega + omega.transpose()));
    const double lmax = spectrum.eigenvalues(0);
    const double lmin = spectrum.eigenvalues(spectrum.eigenvalues.size() - 1);
    if (!(lmax > 0.0)) {
        throw InvalidInputError("moment second moment is zero; cannot form the two-step weight matrix");
    }
    Eigen::VectorXd eig = spectrum.eigenvalues;
    if (lmin <= 1e-12 * lmax) {
        const double ridge = 1e-10 * omega.trace() / static_cast<double>(omega.rows());
        eig = eig.cwiseMax(0.0).array() + ridge;
    }
    const Eigen::MatrixXd inv = spectrum.eigenvectors * eig.cwiseInverse().asDiagonal() * spectrum.eigenvectors.transpose();
    return SymMatrix(0.5 * (inv + inv.transpose()));
}

EstimationResult gmm_estimate_with_matrix(const MomentModel& model, const Sample& data, const SymMatrix& weight,
                                          std::span<const double> w, const OptimizerOptions& optimizer) {
    check_weight_matrix(model, weight);
    const PreparedMoments prepared(model, data);
    return gmm_minimize(prepared, weight, w, optimizer);
}

EstimationResult gmm_estimate(const MomentModel& model, const Sample& data, const GmmConfig& config) {
    const PreparedMoments prepared(model, data);
    switch (config.weight_matrix) {
        case WeightMatrixKind::identity:
            return gmm_minimize(prepared, SymMatrix::identity(model.d), {}, config.optimizer);
        case WeightMatrixKind::user: {
            if (!config.user_matrix) {
                throw InvalidArgumentError("user weight matrix requested but not supplied");
            }
            check_weight_matrix(model, *config.user_matrix);
            const Spectrum s = sym_eigen(*config.user_matrix);
            if (!(s.eigenvalues(s.eigenvalues.size() - 1) > 0.0)) {
                throw NotPsdError("user GMM weight matrix must be positive definite");
            }
            return gmm_minimize(prepared, *config.user_matrix, {}, config.optimizer);
        }
        case WeightMatrixKind::two_step_inverse_omega: {
            const EstimationResult first = gmm_minimize(prepared, SymMatrix::identity(model.d), {}, config.optimizer);
            const SymMatrix weight = inverse_second_moment(prepared.matrix(first.theta_hat));
            EstimationResult second = gmm_minimize(prepared, weight, {}, config.optimizer);
            second.converged = second.converged && first.converged;
            second.iterations += first.iterations;
            return second;
        }
    }
    throw InvalidArgumentError("unknown GMM weight matrix kind");
}

InnerSolution gel_inner_solve(const Eigen::MatrixXd& g, const GelKernel& kern) {
    const Eigen::Index n = g.rows();
    const Eigen::Index d = g.cols();
    const double grad_tol = 1e-10 * static_cast<double>(n);
    const bool bounded = std::isfinite(kern.domain_upper);

    const auto value_at = [&](const Eigen::VectorXd& v) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (bounded && !(v(i) < kern.domain_upper)) {
                return -kInf;
            }
            total += kern.s(v(i));
        }
        return total;
    };

    InnerSolution out;
    out.lambda = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    double value = value_at(v);
    Eigen::VectorXd s1(n);
    Eigen::VectorXd s2(n);
    for (std::size_t iter = 0; iter < kMaxNewtonIterations; ++iter) {
        out.iterations = iter;
        for (Eigen::Index i = 0; i < n; ++i) {
            s1(i) = kern.s1(v(i));
            s2(i) = kern.s2(v(i));
        }
        const Eigen::VectorXd grad = g.transpose() * s1;
        if (!grad.allFinite()) {
            break;
        }
        if (grad.norm() <= grad_tol) {
            // EL implied probabilities -s1(v_i) / n sum to one at a finite
            // optimum; a small gradient far along a recession direction
            // (0 outside the convex hull of the g_i) leaves them near zero.
            out.converged = kern.kind != GelKind::el || std::abs(-s1.sum() / static_cast<double>(n) - 1.0) <= 1e-6;
            break;
        }
        // -H = sum_i (-s2_i) g_i g_i^T is positive definite for concave s.
        const Eigen::MatrixXd neg_hessian = g.transpose() * (-s2).asDiagonal() * g;
        Eigen::VectorXd direction;
        double ridge = 0.0;
        const double scale = std::max(neg_hessian.diagonal().maxCoeff(), 1e-300);
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::LLT<Eigen::MatrixXd> llt(neg_hessian + ridge * Eigen::MatrixXd::Identity(d, d));
            if (llt.info() == Eigen::Success) {
                direction = llt.solve(grad);
                if (direction.allFinite()) {
                    break;
                }
            }
            direction.resize(0);
            ridge = ridge == 0.0 ? 1e-10 * scale : ridge * 10.0;
        }
        if (direction.size() == 0) {
            break;  // persistent singularity
        }
        const double decrement_sq = grad.dot(direction);
        out.decrements.push_back(std::sqrt(std::max(decrement_sq, 0.0)));

        const Eigen::VectorXd dv = g * direction;
        double step = 1.0;
        if (bounded) {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (dv(i) > 0.0) {
                    step = std::min(step, 0.99 * (kern.domain_upper - v(i)) / dv(i));
                }
            }
        }
        // Once the predicted gain is below the rounding noise of the objective,
        // the sufficient-increase test is meaningless; take the full step.
        const bool local = decrement_sq <= 1e-10 * (1.0 + std::abs(value));
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            const Eigen::VectorXd v_new = v + step * dv;
            const double value_new = value_at(v_new);
            if (std::isfinite(value_new) && (local || value_new >= value + kArmijo * step * decrement_sq)) {
                out.lambda += step * direction;
                v = v_new;
                value = value_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No ascent left at machine precision: stationary if the decrement is negligible.
            out.converged = decrement_sq <= 1e-20 * std::max(1.0, std::abs(value));
            out.decrements.pop_back();
            break;
        }
    }
    out.value = value;
    return out;
}

InnerSolution gel_inner_solve(const MomentModel& model, const Sample& data, const Eigen::VectorXd& theta,
                              const GelKernel& kern, std::span<const double> w) {
    if (theta.size() != static_cast<Eigen::Index>(model.q)) {
        throw DimensionError("theta has length " + std::to_string(theta.size()) + ", model expects q = " +
                             std::to_string(model.q));
    }
    const PreparedMoments prepared(model, data);
    return gel_inner_solve(WeightedMean(prepared, w).weighted_matrix(theta), kern);
}

EstimationResult gel_estimate(const MomentModel& model, const Sample& data, const GelKernel& kern,
                              std::span<const double> w, const OptimizerOptions& optimizer) {
    const PreparedMoments prepared(model, data);
    return gel_minimize(prepared, kern, w, optimizer);
}

MstBootstrapResult mst_bootstrap_pvalue(const MomentModel& model, const Sample& data, const MstMethod& method,
                                        const WeightDrawer& drawer, std::size_t reps, const RngState& rng,
                                        const QuantileGrid& grid, std::size_t threads) {
    if (reps < 99) {
        throw InvalidArgumentError("mst_bootstrap_pvalue requires B >= 99");
    }
    const PreparedMoments prepared(model, data);
    MstBootstrapResult out;
    std::vector<double> replicates(reps);
    std::vector<char> converged(reps, 0);

    if (const auto* gmm = std::get_if<GmmConfig>(&method)) {
        const EstimationResult fit = gmm_estimate(model, data, *gmm);
        out.stat = fit.mst_stat;
        out.stat_converged = fit.converged;
        const SymMatrix weight(fit.weight_matrix);
        parallel_for(reps, threads, [&](std::size_t b) {
            const std::vector<double> w = drawer(prepared.n(), rng.with_substream(b + 1));
            const EstimationResult star = gmm_minimize(prepared, weight, w, gmm->optimizer);
            replicates[b] = star.mst_stat;
            converged[b] = star.converged ? 1 : 0;
        });
    } else {
        const GelKernel& kern = std::get<GelKernel>(method);
        const EstimationResult fit = gel_minimize(prepared, kern, {}, OptimizerOptions{});
        out.stat = fit.mst_stat;
        out.stat_converged = fit.converged;
        parallel_for(reps, threads, [&](std::size_t b) {
            const std::vector<double> w = drawer(prepared.n(), rng.with_substream(b + 1));
            const EstimationResult star = gel_minimize(prepared, kern, w, OptimizerOptions{});
            replicates[b] = star.mst_stat;
            converged[b] = star.converged ? 1 : 0;
        });
    }

    out.nonconverged = static_cast<std::size_t>(std::count(converged.begin(), converged.end(), 0));
    if (static_cast<double>(out.nonconverged) > 0.05 * static_cast<double>(reps)) {
        throw ConvergenceError("mst_bootstrap_pvalue: " + std::to_string(out.nonconverged) + " of " +
                               std::to_string(reps) + " bootstrap replicates did not converge");
    }
    std::sort(replicates.begin(), replicates.end());
    // Replicates within round-off of the statistic count as ties, so an exact
    // fit (T = 0 up to rounding) gets p = 1.
    out.pvalue = sorted_pvalue(replicates, out.stat - 1e-8 * (1.0 + std::abs(out.stat)));
    for (const double a : grid.levels()) {
        out.quantiles.push_back(sorted_quantile(replicates, a));
    }
    out.replicates = std::move(replicates);
    return out;
}

MstBootstrapResult mst_bootstrap_pvalue(const MomentModel& model, const Sample& data, const MstMethod& method,
                                        WeightScheme scheme, std::size_t reps, const RngState& rng,
                                        const QuantileGrid& grid, std::size_t threads) {
    const WeightDrawer drawer = [scheme](std::size_t n, const RngState& state) {
        return draw_weights(scheme, n, state);
    };
    return mst_bootstrap_pvalue(model, data, method, drawer, reps, rng, grid, threads);
}

}  // namespace qfboot
