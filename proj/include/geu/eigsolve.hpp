#pragma once

#include "geu/types.hpp"

namespace geu {

// Symmetric-definite pencil (a, b) for the generalized problem
// a v = lambda b v. Both matrices must be square of equal dimension and
// symmetric within 1e-10 relative tolerance.
struct SymmetricPencil {
    Matrix a;
    Matrix b;

    SymmetricPencil(Matrix a_in, Matrix b_in);
};

// All D eigenpairs, eigenvalues ascending. Eigenvectors are B-orthonormal
// with respect to b + ridge*I and column i pairs with eigenvalue i. Each
// column is sign-fixed so its largest-magnitude entry is positive.
struct EigenSolution {
    Vector eigenvalues;
    Matrix eigenvectors;
};

// Scale-relative default regularizer: 1e-8 * trace(b) / D.
double auto_ridge(const Matrix& b);

// Reduces (a, b + ridge*I) to a standard symmetric problem via the
// factorization B = L L^T, solves on L^-1 a L^-T and back-transforms
// v = L^-T u. Throws NotPositiveDefinite when the factorization fails,
// which signals the caller to raise the ridge.
EigenSolution solve_pencil(const SymmetricPencil& pencil, double ridge);

// Number of eigenvalues of the symmetric matrix m whose magnitude exceeds
// rel_tol times the largest magnitude; 0 for the zero matrix.
int numeric_rank(const Matrix& m, double rel_tol);

}  // namespace geu
