#pragma once

#include "qfboot/linalg.hpp"
#include "qfboot/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qfboot {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series for x < a + 1, Lentz continued fraction otherwise.
[[nodiscard]] double regularized_gamma_p(double a, double x);

/// P(chi2_d <= x) = P(d/2, x/2).
[[nodiscard]] double chisq_cdf(int d, double x);

/// Chi-square density with d degrees of freedom.
[[nodiscard]] double chisq_pdf(int d, double x);

/// x with chisq_cdf(d, x) = alpha, found by bracketing and TOMS 748.
[[nodiscard]] double chisq_quantile(int d, double alpha);

[[nodiscard]] double normal_cdf(double x) noexcept;
[[nodiscard]] double normal_pdf(double x) noexcept;
[[nodiscard]] double normal_quantile(double p);

/// m iid draws of sum_j spectrum[j] * chi2_1. Draws are produced in fixed
/// chunks of 4096; chunk c reads stream rng.with_substream(c), so the output
/// does not depend on `threads`.
[[nodiscard]] std::vector<double> weighted_chisq_sample(std::span<const double> spectrum, std::size_t m,
                                                        const RngState& rng, std::size_t threads = 1);

/// (Q - tr Sigma) / sqrt(2 tr Sigma^2).
[[nodiscard]] double normalized_stat(double q, const SymMatrix& sigma);

}  // namespace qfboot
