#include "evo/perturbation.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace evo {

PerturbationOp PerturbationOp::zero() {
    PerturbationOp op;
    op.apply = [](const Trajectory& u) { return Trajectory::zero(u.grid(), u.dim()); };
    op.norm_estimate = [](const Weight&) { return 0.0; };
    return op;
}

namespace {

struct IterationState {
    int stall_count{0};  // consecutive iterations with ratio >= 1

    void observe(double ratio) {
        if (ratio >= 1.0)
            ++stall_count;
        else
            stall_count = 0;
        if (stall_count >= 3) {
            std::ostringstream msg;
            msg << "fixed point iteration diverges (ratio " << ratio
                << " over 3 consecutive iterations)";
            throw SolveError(msg.str());
        }
    }
};

FixedPointReport picard_iterate(const EvoProblem& p, const PerturbationOp& minf, double tol,
                                int max_iter) {
    EvoProblem inner = p;
    Trajectory u = Trajectory::zero(p.grid(), p.dim());
    IterationState state;
    std::vector<IterationRecord> log;
    double prev_delta = -1.0;
    double ratio = 0.0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        inner.F = p.F - minf.apply(u);
        Trajectory next = solve(inner).u;
        const double delta = weighted_norm(next - u, p.w);
        if (prev_delta > 0.0) {
            ratio = delta / prev_delta;
            state.observe(ratio);
        }
        log.push_back({iter, delta, ratio});
        prev_delta = delta;
        u = std::move(next);
        if (delta <= tol) return {std::move(u), iter, ratio, std::move(log)};
    }
    std::ostringstream msg;
    msg << "fixed point iteration did not converge in " << max_iter
        << " iterations (last ratio " << ratio << ")";
    throw SolveError(msg.str());
}

}  // namespace

FixedPointReport fixed_point_solve(const EvoProblem& p, const PerturbationOp& minf, double tol,
                                   int max_iter) {
    p.validate();
    const PosDefCertificate cert = p.require_certificate();
    const double norm = minf.norm_estimate(p.w);
    if (!(norm < cert.c0)) {
        std::ostringstream msg;
        msg << "perturbation norm " << norm << " is not below c0=" << cert.c0
            << "; increase rho (the estimate decreases in rho)";
        throw PreconditionError(msg.str());
    }
    EvoProblem certified = p;
    certified.cert = cert;  // avoid recomputing the certificate per iteration
    return picard_iterate(certified, minf, tol, max_iter);
}

PerturbationOp delay_operator(double tau) {
    if (!(tau > 0.0)) throw PreconditionError("delay_operator: tau must be positive");
    PerturbationOp op;
    // Shift count is rounded to grid multiples; for tau < h/2 this degenerates
    // to the identity.
    op.apply = [tau](const Trajectory& u) {
        const int shift = static_cast<int>(std::lround(tau / u.grid().h()));
        Trajectory out = Trajectory::zero(u.grid(), u.dim());
        for (int k = shift; k <= u.grid().n; ++k) out.col(k) = u.col(k - shift);
        return out;
    };
    op.norm_estimate = [tau](const Weight& w) { return std::exp(-w.rho * tau); };
    return op;
}

PerturbationOp convolution_operator(const Trajectory& kernel) {
    if (kernel.grid().t_min < -kernel.grid().h() / 2)
        throw PreconditionError("convolution_operator: kernel must be supported in t >= 0");
    PerturbationOp op;
    op.apply = [kernel](const Trajectory& u) {
        if (kernel.dim() != 1 && kernel.dim() != u.dim())
            throw PreconditionError("convolution_operator: kernel dim mismatch");
        const double h = u.grid().h();
        Trajectory out = Trajectory::zero(u.grid(), u.dim());
        for (int k = 0; k <= u.grid().n; ++k) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.dim());
            for (int j = 0; j <= k; ++j) {
                const int r = k - j;
                if (r > kernel.grid().n) continue;
                if (kernel.dim() == 1)
                    acc += kernel.col(r)(0) * u.col(j);
                else
                    acc += kernel.col(r).cwiseProduct(u.col(j));
            }
            out.col(k) = h * acc;
        }
        return out;
    };
    op.norm_estimate = [kernel](const Weight& w) {
        const double h = kernel.grid().h();
        double total = 0.0;
        for (int k = 0; k <= kernel.grid().n; ++k) {
            const double t = kernel.grid().t(k);
            if (t < 0.0) continue;
            total += h * kernel.col(k).cwiseAbs().maxCoeff() * std::exp(-w.rho * t);
        }
        return total;
    };
    return op;
}

SubspacePerturbedReport subspace_perturbed_solve(const EvoProblem& p, const PerturbationOp& minf,
                                                 const SubspaceProjector& v, double eps_margin,
                                                 double tol, int max_iter) {
    p.validate();
    if (!(eps_margin > 0.0))
        throw PreconditionError("subspace_perturbed_solve: eps_margin must be positive");
    const std::vector<double> t_samples = sample_times(p.grid());
    const SubspaceCertificateResult sub = subspace_posdef_certificate(p.M0, p.M1, v, t_samples);
    if (!sub.ok()) throw PreconditionError("subspace_perturbed_solve: " + sub.error);
    const double c0 = sub.cert->c0;
    const double c1 = sub.cert->c1;
    if (eps_margin >= c0)
        throw PreconditionError("subspace_perturbed_solve: eps_margin must be below c0");

    // Spot check Re<Minf P_V u | P_V u> >= (eps_margin - c0) |P_V u|^2 on
    // random trajectories (not a proof, a guard).
    {
        std::mt19937_64 rng(0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const Eigen::MatrixXd pv = v.projector();
        for (int trial = 0; trial < 20; ++trial) {
            Trajectory u(p.grid(), p.dim());
            for (int k = 0; k <= p.grid().n; ++k)
                for (int i = 0; i < p.dim(); ++i) u.col(k)(i) = gauss(rng);
            Trajectory pvu(p.grid(), p.dim());
            for (int k = 0; k <= p.grid().n; ++k) pvu.col(k) = pv * u.col(k);
            const Trajectory mpvu = minf.apply(pvu);
            const double lhs = weighted_inner(mpvu, pvu, p.w);
            const double pv_norm = weighted_norm(pvu, p.w);
            const double rhs = (eps_margin - c0) * pv_norm * pv_norm;
            if (lhs < rhs - 1e-8 * std::max(1.0, pv_norm * pv_norm)) {
                std::ostringstream msg;
                msg << "subspace_perturbed_solve: sampled inequality fails ("
                    << lhs << " < " << rhs << ")";
                throw PreconditionError(msg.str());
            }
        }
    }

    // Walk rho up the certificate grid until the combined coercivity constant
    // rho*c1 - norm - norm^2/eps_margin is positive (the cross term between
    // the V and V-perp components is absorbed via Cauchy-Schwarz).
    double worst_constant = -std::numeric_limits<double>::infinity();
    double worst_rho = 0.0;
    for (double rho : default_rho_grid()) {
        if (rho < p.w.rho) continue;
        const Weight w{rho};
        const double norm = minf.norm_estimate(w);
        const double coercive =
            c1 == std::numeric_limits<double>::infinity()
                ? eps_margin - norm  // V = full space: no V-perp component
                : rho * c1 - norm - norm * norm / eps_margin;
        if (coercive > worst_constant) {
            worst_constant = coercive;
            worst_rho = rho;
        }
        if (coercive > 0.0) {
            EvoProblem lifted = p;
            lifted.w = w;
            // The subspace constants stand in for the full-space certificate;
            // the per-step accretivity check still guards the march itself.
            PosDefCertificate cert;
            cert.rho0 = rho;
            cert.c0 = std::min(eps_margin, coercive);
            lifted.cert = std::move(cert);
            FixedPointReport r = picard_iterate(lifted, minf, tol, max_iter);
            return {std::move(r.u), r.iters, r.ratio, rho};
        }
    }
    std::ostringstream msg;
    msg << "subspace_perturbed_solve: no rho in the grid achieves coercivity "
        << "(best constant " << worst_constant << " at rho=" << worst_rho
        << ", c0=" << c0 << ", c1=" << c1 << ")";
    throw PreconditionError(msg.str());
}

}  // namespace evo
