#include "evo/subspace.hpp"

#include <stdexcept>

namespace evo {

SubspaceProjector::SubspaceProjector(int dim, const Eigen::MatrixXd& raw_basis) : dim_(dim) {
    if (raw_basis.rows() != dim) throw std::invalid_argument("SubspaceProjector: basis rows != dim");
    if (raw_basis.cols() < 1 || raw_basis.cols() > dim)
        throw std::invalid_argument("SubspaceProjector: basis rank out of range");

    // Full QR of the basis yields an orthonormal frame whose leading columns
    // span V and whose trailing columns span the complement.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw_basis);
    Eigen::MatrixXd q = qr.householderQ();
    const int r = static_cast<int>(raw_basis.cols());
    basis_ = q.leftCols(r);
    complement_ = q.rightCols(dim - r);
}

SubspaceProjector SubspaceProjector::coordinates(int dim, const std::vector<int>& indices) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] < 0 || indices[j] >= dim)
            throw std::invalid_argument("SubspaceProjector: index out of range");
        basis(indices[j], static_cast<Eigen::Index>(j)) = 1.0;
    }
    return SubspaceProjector(dim, basis);
}

double SubspaceProjector::resolution_defect() const {
    const Eigen::MatrixXd defect =
        projector() + complement_projector() - Eigen::MatrixXd::Identity(dim_, dim_);
    return defect.norm();
}

}  // namespace evo
