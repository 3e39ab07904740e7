#include "qfboot/diagnostics.hpp"

#include "qfboot/errors.hpp"
#include "qfboot/quadratic_form.hpp"
#include "qfboot/reference_dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfboot {

SmoothIndicatorParams::SmoothIndicatorParams(double t_, double delta_, double h_) : t(t_), delta(delta_), h(h_) {
    if (!(delta > 0.0) || !(h > 0.0) || !std::isfinite(t)) {
        throw InvalidArgumentError("smooth indicator needs finite t, delta > 0 and h > 0");
    }
}

double ramp_indicator(double u, double t, double delta) {
    if (!(delta > 0.0)) {
        throw InvalidArgumentError("ramp width must be positive");
    }
    if (u >= t) {
        return 1.0;
    }
    if (u <= t - delta) {
        return 0.0;
    }
    return (u - t + delta) / delta;
}

namespace {

// Phi(hi) - Phi(lo) computed on the side of zero that avoids cancellation.
double normal_mass(double lo, double hi) {
    if (lo > 0.0) {
        return normal_cdf(-lo) - normal_cdf(-hi);
    }
    return normal_cdf(hi) - normal_cdf(lo);
}

}  // namespace

double smooth_indicator(double u, const SmoothIndicatorParams& p) {
    // ramp(v) = 1{v >= t} + (v - t + delta)/delta on (t - delta, t); with
    // v = u + h z the ramp section is z in (lo, hi).
    const double lo = (p.t - p.delta - u) / p.h;
    const double hi = (p.t - u) / p.h;
    const double upper = normal_cdf(-hi);
    const double ramp = ((u - p.t + p.delta) * normal_mass(lo, hi) + p.h * (normal_pdf(lo) - normal_pdf(hi))) / p.delta;
    return std::clamp(upper + ramp, 0.0, 1.0);
}

double h_bound(double delta, double eps) {
    if (!(delta > 0.0)) {
        throw InvalidArgumentError("h_bound requires delta > 0");
    }
    if (!(eps > 0.0 && eps < 0.5)) {
        throw InvalidArgumentError("h_bound requires eps in (0, 0.5), got " + std::to_string(eps));
    }
    return delta / normal_quantile(1.0 - eps);
}

AssumptionReport assumption_report(const Sample& sample, double gamma, double kappa) {
    if (!(gamma >= 0.0) || !(kappa >= 0.0)) {
        throw InvalidArgumentError("assumption_report requires gamma >= 0 and kappa >= 0");
    }
    const Eigen::MatrixXd& z = sample.values();
    const double n = static_cast<double>(sample.n());
    const double d = static_cast<double>(sample.d());

    double m3 = 0.0;
    double m4 = 0.0;
    double m_ii = 0.0;
    double m_iii = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double norm2 = z.row(i).norm();
        m3 += std::pow(norm2, 3.0);
        m4 += std::pow(norm2, 4.0);
        m_ii += std::pow(norm2, 4.0 + 2.0 * gamma);
        const double lp = z.row(i).cwiseAbs().array().pow(2.0 + kappa).sum();  // ||Z||_{2+k}^{2+k}
        m_iii += lp * lp;                                                       // ||Z||_{2+k}^{2(2+k)}
    }
    m3 /= n;
    m4 /= n;
    m_ii /= n;
    m_iii /= n;

    AssumptionReport report;
    report.n = sample.n();
    report.d = sample.d();
    report.gamma = gamma;
    report.kappa = kappa;
    report.ratio_i = {d * m3 * m3 / n, m4 / n, std::pow(d, 4.0) / n};
    report.ratio_ii = std::pow(d, 2.0 + gamma) / std::pow(n, gamma) * m_ii;
    report.ratio_iii = std::pow(std::log(d), kappa / 2.0) * std::pow(d, 2.0 + kappa) / std::pow(n, 1.0 + kappa / 2.0) *
                       m_iii;

    const Spectrum spectrum = sym_eigen(sample_second_moment(sample));
    report.eig_max = spectrum.eigenvalues(0);
    report.eig_min = spectrum.eigenvalues(spectrum.eigenvalues.size() - 1);
    return report;
}

namespace {

void check_draws(const RowDraws& a, const RowDraws& b) {
    if (a.count() == 0 || a.count() != b.count()) {
        throw DimensionError("lindeberg_terms needs the same positive number of replicates on both sides");
    }
    const auto rows = a.replicates.front().rows();
    const auto cols = a.replicates.front().cols();
    if (rows < 1 || cols < 1) {
        throw DimensionError("lindeberg_terms: replicates must be nonempty");
    }
    for (const auto* side : {&a, &b}) {
        for (const auto& m : side->replicates) {
            if (m.rows() != rows || m.cols() != cols) {
                throw DimensionError("lindeberg_terms: every replicate must be " + std::to_string(rows) + "x" +
                                     std::to_string(cols));
            }
        }
    }
}

}  // namespace

LindebergTerms lindeberg_terms(const RowDraws& a, const RowDraws& b, double l2, double l3, double q) {
    check_draws(a, b);
    if (!(l2 > 0.0) || !(l3 > 0.0) || !(q > 0.0)) {
        throw InvalidArgumentError("lindeberg_terms requires L2, L3, q > 0");
    }
    const Eigen::Index n = a.replicates.front().rows();
    const Eigen::Index d = a.replicates.front().cols();
    const double reps = static_cast<double>(a.count());

    double sum_m4 = 0.0;
    double sum_m3 = 0.0;
    double sum_tr_c = 0.0;
    double sum_cross = 0.0;
    double sum_high = 0.0;
    for (std::size_t r = 0; r < a.count(); ++r) {
        const Eigen::MatrixXd& ar = a.replicates[r];
        const Eigen::MatrixXd& br = b.replicates[r];
        // S_{i:n} = sum_{j<i} A_j + sum_{j>i} B_j, swept left to right.
        Eigen::VectorXd partial = br.colwise().sum().transpose();
        Eigen::VectorXd s_i(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd ai = ar.row(i).transpose();
            const Eigen::VectorXd bi = br.row(i).transpose();
            s_i = partial - bi;
            const double na2 = ai.squaredNorm();
            const double nb2 = bi.squaredNorm();
            sum_m4 += na2 * na2 + nb2 * nb2;
            sum_m3 += std::pow(na2, 1.5) + std::pow(nb2, 1.5);
            sum_tr_c += 0.5 * (na2 + nb2);
            sum_cross += std::pow(std::abs(s_i.dot(bi)), 2.0 + q) + std::pow(std::abs(s_i.dot(ai)), 2.0 + q);
            sum_high += std::pow(nb2, 2.0 + q) + std::pow(na2, 2.0 + q);
            partial = s_i + ai;
        }
    }
    LindebergTerms out;
    out.s1_bound = l2 * sum_m4 / reps;
    out.s2_bound = l2 * std::sqrt(sum_tr_c / reps) * (sum_m3 / reps);
    out.r_bound = (sum_cross + sum_high) / reps;
    out.total = out.s1_bound + out.s2_bound + l2 * std::pow(l3 / l2, q) * out.r_bound;
    return out;
}

double anticoncentration_estimate(const SymMatrix& sigma, double gamma, std::size_t draws, const RngState& rng,
                                  std::size_t threads) {
    if (!(gamma >= 0.0)) {
        throw InvalidArgumentError("anticoncentration_estimate requires gamma >= 0");
    }
    if (draws < 10000) {
        throw InvalidArgumentError("anticoncentration_estimate requires at least 10^4 draws");
    }
    const Spectrum spectrum = sym_eigen(sigma);
    const double lmax = std::max(spectrum.eigenvalues(0), 0.0);
    const double lmin = spectrum.eigenvalues(spectrum.eigenvalues.size() - 1);
    if (lmin < -kPsdTolerance * lmax || (lmax == 0.0 && lmin < 0.0)) {
        throw NotPsdError("anticoncentration_estimate: sigma is not positive semidefinite");
    }
    std::vector<double> lambdas(static_cast<std::size_t>(spectrum.eigenvalues.size()));
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        lambdas[j] = std::max(spectrum.eigenvalues(static_cast<Eigen::Index>(j)), 0.0);
    }
    std::vector<double> values = weighted_chisq_sample(lambdas, draws, rng, threads);
    std::sort(values.begin(), values.end());

    const double half_width = gamma * std::sqrt(trace_power(sigma, 2));
    constexpr std::size_t kCenterStride = 200;
    std::size_t best = 0;
    for (std::size_t k = 0; k < values.size(); k += kCenterStride) {
        const double c = values[k];
        const auto lo = std::lower_bound(values.begin(), values.end(), c - half_width);
        const auto hi = std::upper_bound(values.begin(), values.end(), c + half_width);
        best = std::max(best, static_cast<std::size_t>(std::distance(lo, hi)));
    }
    return static_cast<double>(best) / static_cast<double>(values.size());
}

}  // namespace qfboot
