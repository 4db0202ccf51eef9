#include "evo/skew.hpp"

#include <stdexcept>

namespace evo {

SkewCheck check_skew(const Eigen::MatrixXd& a, double tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("check_skew: matrix must be square");
    const double defect = (a + a.transpose()).norm();
    return {defect <= tol, defect};
}

SkewOperator::SkewOperator(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    const SkewCheck chk = check_skew(matrix_, 1e-12);
    if (!chk.ok) throw std::invalid_argument("SkewOperator: matrix is not skew-symmetric");
}

SkewOperator SkewOperator::zero(int dim) {
    return SkewOperator(Eigen::MatrixXd::Zero(dim, dim));
}

SkewOperator make_block_skew(const Eigen::MatrixXd& c) {
    const Eigen::Index p = c.cols();
    const Eigen::Index q = c.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p + q, p + q);
    a.topRightCorner(p, q) = c.transpose();
    a.bottomLeftCorner(q, p) = -c;
    return SkewOperator(std::move(a));
}

Eigen::MatrixXd grad_1d_dirichlet(int m, double dx) {
    if (m < 2) throw std::invalid_argument("grad_1d_dirichlet: m must be >= 2");
    if (!(dx > 0.0)) throw std::invalid_argument("grad_1d_dirichlet: dx must be positive");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        d(j, j) = 1.0 / dx;
        if (j > 0) d(j, j - 1) = -1.0 / dx;
    }
    return d;
}

}  // namespace evo
