#include "rmt/lapack.hpp"

#include <stdexcept>

#include <complex>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace rmt {

void svd_complex(const Eigen::MatrixXcd& A, Eigen::MatrixXcd& U,
                 Eigen::VectorXd& s, Eigen::MatrixXcd& V) {
    const int n = int(A.rows());
    if (A.cols() != n) throw std::invalid_argument("svd_complex: square input required");
    Eigen::MatrixXcd work = A;  // zgesdd destroys its input
    U.resize(n, n);
    s.resize(n);
    Eigen::MatrixXcd vt(n, n);
    const int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, s.data(), U.data(), n,
        vt.data(), n);
    if (info != 0) throw std::runtime_error("zgesdd failed, info=" + std::to_string(info));
    V = vt.adjoint();
}

Eigen::VectorXcd eigvals_complex(const Eigen::MatrixXcd& A) {
    const int n = int(A.rows());
    if (A.cols() != n) throw std::invalid_argument("eigvals_complex: square input required");
    Eigen::MatrixXcd work = A;
    Eigen::VectorXcd vals(n);
    const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n,
                                   vals.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("zgeev failed, info=" + std::to_string(info));
    return vals;
}

}  // namespace rmt
