#pragma once

#include "evo/solver.hpp"
#include "evo/subspace.hpp"

#include <functional>
#include <vector>

namespace evo {

/// A causal perturbation M_inf of the main part. norm_estimate(w) bounds the
/// weighted operator norm (or best Lipschitz constant when lipschitz_flag is
/// set). causal_flag is asserted by the constructor of the op, not proved.
struct PerturbationOp {
    std::function<Trajectory(const Trajectory&)> apply;
    std::function<double(const Weight&)> norm_estimate;
    bool causal_flag{true};
    bool lipschitz_flag{false};

    static PerturbationOp zero();
};

struct IterationRecord {
    int iter{0};
    double delta_norm{0.0};
    double ratio{0.0};
};

struct FixedPointReport {
    Trajectory u;
    int iters{0};
    double ratio{0.0};  // last observed ||du_{k+1}|| / ||du_k||
    std::vector<IterationRecord> log;
};

/// Picard iteration u <- solve(p with F - Minf(u)). Requires
/// Minf.norm_estimate(rho) < c0 strictly; throws PreconditionError otherwise
/// (advising a larger rho). Throws SolveError on divergence (ratio >= 1 over
/// 3 consecutive iterations) or when max_iter is exceeded.
FixedPointReport fixed_point_solve(const EvoProblem& p, const PerturbationOp& minf,
                                   double tol = 1e-10, int max_iter = 200);

/// Right shift by round(tau/h) samples with zero fill; the shift count is a
/// grid rounding, fractional-step interpolation is deliberately not done.
/// norm_estimate(rho) = e^{-rho tau}.
PerturbationOp delay_operator(double tau);

/// Discrete causal convolution (K u)_k = h * sum_{j<=k} kernel_{k-j} u_j for a
/// kernel sampled on a grid starting at t >= 0 (componentwise product for
/// matching dims, scalar kernel broadcasts). norm_estimate(rho) =
/// h * sum_k |kernel_k| e^{-rho t_k}.
PerturbationOp convolution_operator(const Trajectory& kernel);

struct SubspacePerturbedReport {
    Trajectory u;
    int iters{0};
    double ratio{0.0};
    double rho_used{0.0};
};

/// fixed_point_solve with the degenerate-M0 convergence guard: rho is walked
/// up the certificate grid until rho*c1 - norm - norm^2/(c0 - eps_margin) > 0
/// with the constants from subspace_posdef_certificate. Also spot-checks
/// Re<Minf P_V u | P_V u> >= (eps_margin - c0) |P_V u|^2 on random samples.
SubspacePerturbedReport subspace_perturbed_solve(const EvoProblem& p, const PerturbationOp& minf,
                                                 const SubspaceProjector& v, double eps_margin,
                                                 double tol = 1e-10, int max_iter = 200);

}  // namespace evo
