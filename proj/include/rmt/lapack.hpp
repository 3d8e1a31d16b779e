// Thin LAPACKE wrappers for the two dense kernels Eigen is slow at:
// complex SVD (zgesdd) and the general complex eigenproblem (zgeev).

#pragma once

#include <Eigen/Dense>

namespace rmt {

// Full SVD of a square complex matrix: A = U diag(s) V^*, s descending.
void svd_complex(const Eigen::MatrixXcd& A, Eigen::MatrixXcd& U,
                 Eigen::VectorXd& s, Eigen::MatrixXcd& V);

// Eigenvalues of a general complex matrix.
Eigen::VectorXcd eigvals_complex(const Eigen::MatrixXcd& A);

}  // namespace rmt
