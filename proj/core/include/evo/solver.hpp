#pragma once

#include "evo/operator_family.hpp"
#include "evo/posdef.hpp"
#include "evo/skew.hpp"
#include "evo/weighted_calculus.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace evo {

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The assembled problem (d0 M0(m0) + M1(m0) + A) u = F on a grid with
/// weight rho.
struct EvoProblem {
    OperatorFamily M0;
    OperatorFamily M1;
    SkewOperator A;
    Trajectory F;
    Weight w;
    std::optional<PosDefCertificate> cert;

    const TimeGrid& grid() const { return F.grid(); }
    int dim() const { return F.dim(); }

    void validate() const;

    /// Certificate at w.rho; computes one on the grid's sample times when
    /// absent. Throws PreconditionError if none exists.
    PosDefCertificate require_certificate() const;
};

struct SolveReport {
    Trajectory u;
    double norm_u{0.0};
    double norm_F{0.0};
    double bound_ratio{0.0};  // norm_u * c0 / norm_F
    std::vector<double> energy_residuals;
    double causality_defect{0.0};
    double step_accretivity_min{0.0};
};

/// Causal implicit march of the conservative discretization
///   (M0(t_k)/h + M1(t_k) + A) u_k = F_k + M0(t_{k-1}) u_{k-1}/h,  u_{-1} = 0.
/// Aborts with SolveError when a step matrix is singular or non-accretive.
SolveReport solve(const EvoProblem& p);

/// The discrete space-time operator applied to a trajectory (same scheme as
/// the solver; B u = F for u = solve(p).u).
Trajectory apply_operator(const EvoProblem& p, const Trajectory& u);

/// The exact adjoint of apply_operator under the weighted inner product.
Trajectory apply_adjoint_operator(const EvoProblem& p, const Trajectory& u);

/// Independent verification path: assembles the full space-time block matrix
/// of the same scheme and solves it densely. Guard: (n+1)*dim <= 4096.
Trajectory oracle_dense_solve(const EvoProblem& p);

/// Anticausal backward march realizing the inverse of apply_adjoint_operator.
SolveReport solve_adjoint(const EvoProblem& p);

/// |left - right| of the discrete energy identity at cut time a: left is the
/// weighted integral of Re<d0(M0 u) + M1 u + A u | u> up to a, right is the
/// boundary term plus the rho*M0 and (1/2 dM0 + Re M1) integrals.
double energy_identity_residual(const EvoProblem& p, const Trajectory& u, double a);

/// Solves with the forcing truncated to t > a and returns
/// max_{t_k <= a} |u_k|; exactly 0 up to round-off for the causal march.
double verify_causality(const EvoProblem& p, double a);

/// norm_u <= (1/c0) * (1 + bound_slack) * norm_F.
bool verify_norm_bound(const SolveReport& r, const PosDefCertificate& cert,
                       double bound_slack = 0.1);

}  // namespace evo
