#include "geu/eigsolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "geu/errors.hpp"

namespace geu {

namespace {

void check_square_symmetric(const Matrix& m, const char* name) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw DimensionMismatch(std::string(name) + " must be square, got " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
    }
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale) {
        throw NumericalError(std::string(name) + " is not symmetric: max|m - m^T| = " +
                             std::to_string(asym));
    }
}

}  // namespace

SymmetricPencil::SymmetricPencil(Matrix a_in, Matrix b_in)
    : a(std::move(a_in)), b(std::move(b_in)) {
    check_square_symmetric(a, "pencil.a");
    check_square_symmetric(b, "pencil.b");
    if (a.rows() != b.rows()) {
        throw DimensionMismatch("pencil matrices differ in dimension: " +
                                std::to_string(a.rows()) + " vs " +
                                std::to_string(b.rows()));
    }
}

double auto_ridge(const Matrix& b) {
    return 1e-8 * b.trace() / static_cast<double>(b.rows());
}

EigenSolution solve_pencil(const SymmetricPencil& pencil, double ridge) {
    if (ridge < 0.0) throw NumericalError("ridge must be nonnegative");
    const Eigen::Index dim = pencil.a.rows();

    Matrix b_reg = pencil.b;
    b_reg.diagonal().array() += ridge;

    Eigen::LLT<Matrix> llt(b_reg);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite(
            "b + ridge*I is not positive definite (ridge = " +
            std::to_string(ridge) + "); raise the ridge");
    }
    const auto L = llt.matrixL();

    // C = L^-1 a L^-T, symmetric by construction up to roundoff.
    Matrix c = L.solve(pencil.a);
    c = L.solve(Matrix(c.transpose()));

    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    if (es.info() != Eigen::Success) {
        throw NumericalError("symmetric eigendecomposition did not converge");
    }

    EigenSolution sol;
    sol.eigenvalues = es.eigenvalues();  // ascending
    sol.eigenvectors = L.transpose().solve(es.eigenvectors());

    for (Eigen::Index j = 0; j < dim; ++j) {
        Eigen::Index imax = 0;
        sol.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
        if (sol.eigenvectors(imax, j) < 0.0) sol.eigenvectors.col(j) *= -1.0;
    }
    return sol;
}

int numeric_rank(const Matrix& m, double rel_tol) {
    check_square_symmetric(m, "matrix");
    if (rel_tol <= 0.0) throw NumericalError("rel_tol must be positive");

    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    const Vector evs = es.eigenvalues();
    const double max_abs = evs.cwiseAbs().maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < evs.size(); ++i) {
        if (std::abs(evs[i]) > rel_tol * max_abs) ++rank;
    }
    return rank;
}

}  // namespace geu
