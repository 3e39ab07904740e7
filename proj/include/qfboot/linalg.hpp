#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace qfboot {

/// Dense symmetric matrix with finite entries.
///
/// Construction checks symmetry to 1e-12 relative to the largest absolute
/// entry and stores the exactly symmetrized average (A + A^T) / 2.
class SymMatrix {
public:
    explicit SymMatrix(const Eigen::MatrixXd& entries);

    static SymMatrix identity(std::size_t d);
    static SymMatrix diagonal(const Eigen::VectorXd& diag);

    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd m_;
};

/// Eigen-decomposition with eigenvalues in descending order; column k of
/// `eigenvectors` belongs to `eigenvalues[k]`.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

[[nodiscard]] Spectrum sym_eigen(const SymMatrix& m);

/// Raw-matrix overload; throws InvalidInputError unless `m` is square and
/// symmetric to 1e-12 relative.
[[nodiscard]] Spectrum sym_eigen(const Eigen::MatrixXd& m);

/// Principal square root of a PSD matrix. Eigenvalues down to
/// -1e-10 * lambda_max are treated as round-off and clamped to zero; anything
/// more negative raises NotPsdError.
[[nodiscard]] SymMatrix matrix_sqrt(const SymMatrix& m);

/// tr(m^k) for k in {1, 2, 3}.
[[nodiscard]] double trace_power(const SymMatrix& m, int k);

/// Relative tolerance under which eigenvalues count as round-off negatives.
inline constexpr double kPsdTolerance = 1e-10;

}  // namespace qfboot
