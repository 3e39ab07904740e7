#include "qfboot/linalg.hpp"

#include "qfboot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfboot {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

void check_symmetric(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("symmetric matrix must be square, got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    if (m.rows() == 0) {
        throw InvalidInputError("symmetric matrix must have positive dimension");
    }
    if (!m.allFinite()) {
        throw InvalidInputError("matrix has non-finite entries");
    }
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * scale) {
        throw InvalidInputError("matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
    }
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& entries) {
    check_symmetric(entries);
    m_ = 0.5 * (entries + entries.transpose());
}

SymMatrix SymMatrix::identity(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
    return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

Spectrum sym_eigen(const Eigen::MatrixXd& m) {
    check_symmetric(m);
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw InvalidInputError("symmetric eigen-decomposition failed");
    }
    // Eigen returns ascending order.
    Spectrum out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

Spectrum sym_eigen(const SymMatrix& m) { return sym_eigen(m.matrix()); }

SymMatrix matrix_sqrt(const SymMatrix& m) {
    Spectrum s = sym_eigen(m);
    const double lmax = std::max(s.eigenvalues.maxCoeff(), 0.0);
    const double lmin = s.eigenvalues.minCoeff();
    if (lmin < -kPsdTolerance * lmax || (lmax == 0.0 && lmin < 0.0)) {
        throw NotPsdError("matrix_sqrt: eigenvalue " + std::to_string(lmin) + " is below the PSD tolerance");
    }
    const Eigen::VectorXd roots = s.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root = s.eigenvectors * roots.asDiagonal() * s.eigenvectors.transpose();
    return SymMatrix(0.5 * (root + root.transpose()));
}

double trace_power(const SymMatrix& m, int k) {
    const Eigen::MatrixXd& a = m.matrix();
    switch (k) {
        case 1:
            return a.trace();
        case 2:
            // tr(A^2) = sum_{ij} a_ij^2 for symmetric A
            return a.cwiseAbs2().sum();
        case 3:
            return (a * a).cwiseProduct(a).sum();
        default:
            throw InvalidArgumentError("trace_power supports k in {1,2,3}, got " + std::to_string(k));
    }
}

}  // namespace qfboot
