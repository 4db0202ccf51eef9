#pragma once

#include <Eigen/Dense>

namespace evo {

struct SkewCheck {
    bool ok{false};
    double defect{0.0};  // ||A + A^T||
};

/// true iff ||A + A^T|| <= tol.
SkewCheck check_skew(const Eigen::MatrixXd& a, double tol = 1e-12);

/// Discrete skew-selfadjoint spatial operator. Construction validates
/// skewness to 1e-12.
class SkewOperator {
public:
    explicit SkewOperator(Eigen::MatrixXd matrix);

    static SkewOperator zero(int dim);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

private:
    Eigen::MatrixXd matrix_;
};

/// [[0, C^T], [-C, 0]]; exactly skew for any p x q block C.
SkewOperator make_block_skew(const Eigen::MatrixXd& c);

/// 1-D backward-difference gradient with homogeneous Dirichlet closure on the
/// left cell boundary: (D u)_0 = u_0/dx, (D u)_j = (u_j - u_{j-1})/dx. The
/// pair (D, -D^T) is an exact discrete (grad, div) with no boundary residue.
Eigen::MatrixXd grad_1d_dirichlet(int m, double dx);

}  // namespace evo
