#pragma once

#include "evo/perturbation.hpp"
#include "evo/solver.hpp"
#include "evo/subspace.hpp"

#include <vector>

namespace evo {

/// 1-D visco-elastic solid with stress law T = (C(t) + D(t) d0) Grad u, where
/// D = diag(B(t), 0) on the viscous/elastic split of the stress space. Scalar
/// velocity and stress per cell, so the state dimension is 2m.
struct KelvinVoigtConfig {
    int m{16};
    double dx{0.1};
    std::vector<int> viscous_cells;  // stress-space coordinates spanning V
    OperatorFamily C;                // m x m, selfadjoint, iota_perp* C iota_perp >= c
    OperatorFamily B;                // |V| x |V| on V, Re B >= c
    OperatorFamily eta;              // m x m mass density, eta >= c
    double c{1.0};

    void validate() const;

    /// Reference material: viscous left half, C = identity, B = identity,
    /// eta = 1, c = 1.
    static KelvinVoigtConfig reference(int m, double dx);

    /// Every cell viscous; exercises the V = full space branch.
    static KelvinVoigtConfig purely_viscous(int m, double dx);
};

/// Block factorization of the stress law at one time: in [V; V_perp] block
/// coordinates, blocked(C_t) = S^{-*} diag(schur_block, c_block^{-1}) S^{-1}.
struct SchurDecomposition {
    Eigen::MatrixXd S;            // [[1,0],[-c_block * C_perpV, 1]]
    Eigen::MatrixXd schur_block;  // C_VV - C_Vperp c_block C_perpV
    Eigen::MatrixXd c_block;      // (iota_perp* C iota_perp)^{-1}
};

SchurDecomposition schur_decompose(const Eigen::MatrixXd& c_t, const Eigen::MatrixXd& b_t,
                                   const SubspaceProjector& v);

/// Reassembles blocked(C_t) from the decomposition (oracle for the identity).
Eigen::MatrixXd schur_reconstruct(const SchurDecomposition& dec);

/// Randomized Rayleigh estimate of the Neumann tail norm at weight w; throws
/// when the contraction factor |B^{-1} schur| / rho reaches 1 (advising a
/// larger rho).
double neumann_tail_norm(const KelvinVoigtConfig& cfg, const Weight& w, const TimeGrid& grid);

struct KelvinVoigtSystem {
    EvoProblem p;
    PerturbationOp minf;
    SubspaceProjector V;  // full-state subspace where M0 degenerates
};

/// Assembles the first-order (v, T) system: M0 = diag(eta, M~0),
/// M1 = diag(0, M~1), A the block-skew difference pair; the S-derivative term
/// and the Neumann tail ride along as the perturbation.
KelvinVoigtSystem build_kv_problem(const KelvinVoigtConfig& cfg, const Weight& w,
                                   const TimeGrid& grid, const Trajectory& F);

}  // namespace evo
