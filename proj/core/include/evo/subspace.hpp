#pragma once

#include <Eigen/Dense>

#include <vector>

namespace evo {

/// Orthogonal decomposition H = V + V_perp, stored as orthonormal bases
/// (the embeddings iota_V and iota_{V_perp}).
class SubspaceProjector {
public:
    /// From an arbitrary basis (columns); orthonormalized internally.
    SubspaceProjector(int dim, const Eigen::MatrixXd& raw_basis);

    /// Coordinate subspace spanned by the given unit vectors.
    static SubspaceProjector coordinates(int dim, const std::vector<int>& indices);

    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(basis_.cols()); }

    const Eigen::MatrixXd& basis() const { return basis_; }            // iota_V
    const Eigen::MatrixXd& complement() const { return complement_; }  // iota_{V_perp}

    Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }
    Eigen::MatrixXd complement_projector() const { return complement_ * complement_.transpose(); }

    /// || iota_V iota_V^T + iota_{V_perp} iota_{V_perp}^T - 1 ||
    double resolution_defect() const;

private:
    SubspaceProjector() = default;
    int dim_{0};
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd complement_;
};

}  // namespace evo
