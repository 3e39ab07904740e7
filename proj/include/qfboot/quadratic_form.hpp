#pragma once

#include "qfboot/linalg.hpp"
#include "qfboot/sample.hpp"

#include <span>

namespace qfboot {

/// Q_n = n * ||mean(Z)||^2.
[[nodiscard]] double quadratic_form_stat(const Sample& sample);

/// Q*_n = n * ||n^{-1} sum_i w_i Z_i||^2.
[[nodiscard]] double weighted_quadratic_form_stat(const Sample& sample, std::span<const double> w);

/// Uncentered second moment n^{-1} sum_i Z_i Z_i^T. Callers center upstream.
[[nodiscard]] SymMatrix sample_second_moment(const Sample& sample);

/// max_{j,l} |(n^{-1} sum_i Z_i Z_i^T)_{jl} - target_{jl}|.
[[nodiscard]] double max_cov_discrepancy(const Sample& sample, const SymMatrix& target);

}  // namespace qfboot
