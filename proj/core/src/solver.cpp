#include "evo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evo {

namespace {

double min_sym_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Per-step factorization with reuse when the assembled matrix repeats
/// (piecewise-constant coefficient families hit this cache on every step
/// inside a segment).
class StepFactorCache {
public:
    const Eigen::PartialPivLU<Eigen::MatrixXd>& factor(const Eigen::MatrixXd& k,
                                                       double* min_eig_out) {
        if (!have_ || k != last_) {
            last_ = k;
            lu_.compute(k);
            min_eig_ = min_sym_eigenvalue(k);
            have_ = true;
        }
        if (min_eig_out) *min_eig_out = min_eig_;
        return lu_;
    }

private:
    bool have_{false};
    Eigen::MatrixXd last_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double min_eig_{0.0};
};

struct MarchResult {
    Trajectory u;
    double accretivity_min{0.0};
};

/// The raw causal march; shared by solve() and verify_causality().
MarchResult march(const EvoProblem& p) {
    const TimeGrid& grid = p.grid();
    const double h = grid.h();
    const int d = p.dim();

    Trajectory u(grid, d);
    StepFactorCache cache;
    double accretivity_min = std::numeric_limits<double>::infinity();

    Eigen::MatrixXd m0_prev;  // M0(t_{k-1}); unused at k = 0 (u_{-1} = 0)
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.t(k);
        const Eigen::MatrixXd m0_k = p.M0.at(t);
        const Eigen::MatrixXd step = m0_k / h + p.M1.at(t) + p.A.matrix();

        double min_eig = 0.0;
        const auto& lu = cache.factor(step, &min_eig);
        accretivity_min = std::min(accretivity_min, min_eig);
        if (!(min_eig > 0.0)) {
            std::ostringstream msg;
            msg << "non-accretive step matrix at t=" << t << " (min eigenvalue " << min_eig
                << ")";
            throw SolveError(msg.str());
        }

        Eigen::VectorXd rhs = p.F.col(k);
        if (k > 0) rhs += m0_prev * u.col(k - 1) / h;
        const Eigen::VectorXd uk = lu.solve(rhs);
        if (!uk.allFinite()) {
            std::ostringstream msg;
            msg << "singular step matrix at t=" << t;
            throw SolveError(msg.str());
        }
        u.col(k) = uk;
        m0_prev = m0_k;
    }
    return {std::move(u), accretivity_min};
}

}  // namespace

void EvoProblem::validate() const {
    const int d = dim();
    if (M0.dim != d || M1.dim != d || A.dim() != d)
        throw PreconditionError("EvoProblem: M0/M1/A/F dimensions disagree");
    if (cert && w.rho < cert->rho0)
        throw PreconditionError("EvoProblem: weight rho below certificate rho0");
}

PosDefCertificate EvoProblem::require_certificate() const {
    if (cert) return *cert;
    const CertificateResult result =
        posdef_certificate(M0, M1, {w.rho}, sample_times(grid()));
    if (!result.ok()) {
        std::ostringstream msg;
        msg << "no positive definiteness certificate at rho=" << w.rho
            << " (worst eigenvalue " << result.worst.min_eigenvalue << " at t="
            << result.worst.t << ")";
        throw PreconditionError(msg.str());
    }
    return *result.cert;
}

SolveReport solve(const EvoProblem& p) {
    p.validate();
    const PosDefCertificate cert = p.require_certificate();

    const TimeGrid& grid = p.grid();
    MarchResult m = march(p);

    SolveReport report{std::move(m.u), 0.0, 0.0, 0.0, {}, 0.0, m.accretivity_min};
    report.norm_u = weighted_norm(report.u, p.w);
    report.norm_F = weighted_norm(p.F, p.w);
    report.bound_ratio =
        report.norm_F > 0.0 ? report.norm_u * cert.c0 / report.norm_F : 0.0;
    for (double frac : {0.25, 0.5, 0.75}) {
        const double a = grid.t_min + frac * (grid.t_max - grid.t_min);
        report.energy_residuals.push_back(energy_identity_residual(p, report.u, a));
    }
    report.causality_defect =
        verify_causality(p, grid.t_min + 0.5 * (grid.t_max - grid.t_min));
    return report;
}

Trajectory apply_operator(const EvoProblem& p, const Trajectory& u) {
    p.F.require_shape(u);
    const TimeGrid& grid = p.grid();
    const double h = grid.h();
    Trajectory out(grid, p.dim());
    Eigen::VectorXd prev_m0u = Eigen::VectorXd::Zero(p.dim());
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.t(k);
        const Eigen::VectorXd m0u = p.M0.at(t) * u.col(k);
        out.col(k) = (m0u - prev_m0u) / h + p.M1.at(t) * u.col(k) + p.A.matrix() * u.col(k);
        prev_m0u = m0u;
    }
    return out;
}

Trajectory apply_adjoint_operator(const EvoProblem& p, const Trajectory& v) {
    p.F.require_shape(v);
    const TimeGrid& grid = p.grid();
    const double h = grid.h();
    const Eigen::VectorXd q = quad_weights(grid, p.w);
    Trajectory out(grid, p.dim());
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.t(k);
        const Eigen::MatrixXd step = p.M0.at(t) / h + p.M1.at(t) + p.A.matrix();
        Eigen::VectorXd acc = step.transpose() * v.col(k);
        if (k < grid.n)
            acc -= (q(k + 1) / q(k)) * (p.M0.at(t).transpose() * v.col(k + 1)) / h;
        out.col(k) = acc;
    }
    return out;
}

Trajectory oracle_dense_solve(const EvoProblem& p) {
    p.validate();
    const TimeGrid& grid = p.grid();
    const int d = p.dim();
    const Eigen::Index total = static_cast<Eigen::Index>(grid.points()) * d;
    if (total > 4096) throw PreconditionError("oracle_dense_solve: (n+1)*dim exceeds 4096");

    const double h = grid.h();
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(total, total);
    Eigen::VectorXd rhs(total);
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.t(k);
        big.block(k * d, k * d, d, d) = p.M0.at(t) / h + p.M1.at(t) + p.A.matrix();
        if (k > 0) big.block(k * d, (k - 1) * d, d, d) = -p.M0.at(grid.t(k - 1)) / h;
        rhs.segment(k * d, d) = p.F.col(k);
    }
    const Eigen::VectorXd flat = big.partialPivLu().solve(rhs);
    if (!flat.allFinite()) throw SolveError("oracle_dense_solve: singular space-time matrix");

    Trajectory u(grid, d);
    for (int k = 0; k <= grid.n; ++k) u.col(k) = flat.segment(k * d, d);
    return u;
}

SolveReport solve_adjoint(const EvoProblem& p) {
    p.validate();
    const PosDefCertificate cert = p.require_certificate();

    const TimeGrid& grid = p.grid();
    const double h = grid.h();
    const int d = p.dim();
    const Eigen::VectorXd q = quad_weights(grid, p.w);

    Trajectory v(grid, d);
    double accretivity_min = std::numeric_limits<double>::infinity();
    for (int k = grid.n; k >= 0; --k) {
        const double t = grid.t(k);
        const Eigen::MatrixXd step =
            (p.M0.at(t) / h + p.M1.at(t) + p.A.matrix()).transpose();
        const double min_eig = min_sym_eigenvalue(step);
        accretivity_min = std::min(accretivity_min, min_eig);
        if (!(min_eig > 0.0)) {
            std::ostringstream msg;
            msg << "non-accretive adjoint step matrix at t=" << t;
            throw SolveError(msg.str());
        }
        Eigen::VectorXd rhs = p.F.col(k);
        if (k < grid.n)
            rhs += (q(k + 1) / q(k)) * (p.M0.at(t).transpose() * v.col(k + 1)) / h;
        const Eigen::VectorXd vk = step.partialPivLu().solve(rhs);
        if (!vk.allFinite()) throw SolveError("solve_adjoint: singular step matrix");
        v.col(k) = vk;
    }

    SolveReport report{std::move(v), 0.0, 0.0, 0.0, {}, 0.0, accretivity_min};
    report.norm_u = weighted_norm(report.u, p.w);
    report.norm_F = weighted_norm(p.F, p.w);
    report.bound_ratio =
        report.norm_F > 0.0 ? report.norm_u * cert.c0 / report.norm_F : 0.0;
    return report;
}

double energy_identity_residual(const EvoProblem& p, const Trajectory& u, double a) {
    p.F.require_shape(u);
    const TimeGrid& grid = p.grid();
    const double h = grid.h();
    const double rho = p.w.rho;

    double left = 0.0;
    double right_integrals = 0.0;
    Eigen::VectorXd prev_m0u = Eigen::VectorXd::Zero(p.dim());
    int cut_index = -1;
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.t(k);
        const Eigen::VectorXd m0u = p.M0.at(t) * u.col(k);
        if (t <= a) {
            cut_index = k;
            const double weight = h * std::exp(-2.0 * rho * t);
            const Eigen::VectorXd op =
                (m0u - prev_m0u) / h + p.M1.at(t) * u.col(k) + p.A.matrix() * u.col(k);
            left += weight * op.dot(u.col(k));

            const Eigen::MatrixXd re_m1 = 0.5 * (p.M1.at(t) + p.M1.at(t).transpose());
            right_integrals += weight * (rho * u.col(k).dot(m0u) +
                                         u.col(k).dot(0.5 * p.M0.derivative_at(t) * u.col(k) +
                                                      re_m1 * u.col(k)));
        }
        prev_m0u = m0u;
    }
    if (cut_index < 0) return 0.0;

    const double ta = grid.t(cut_index);
    const double boundary =
        0.5 * u.col(cut_index).dot(p.M0.at(ta) * u.col(cut_index)) * std::exp(-2.0 * rho * ta);
    return std::abs(left - (boundary + right_integrals));
}

double verify_causality(const EvoProblem& p, double a) {
    EvoProblem truncated = p;
    truncated.F = p.F - cutoff(p.F, a);  // forcing supported in t > a
    const Trajectory u = march(truncated).u;
    double defect = 0.0;
    for (int k = 0; k <= p.grid().n; ++k)
        if (p.grid().t(k) <= a) defect = std::max(defect, u.col(k).cwiseAbs().maxCoeff());
    return defect;
}

bool verify_norm_bound(const SolveReport& r, const PosDefCertificate& cert, double bound_slack) {
    return r.norm_u <= (1.0 / cert.c0) * (1.0 + bound_slack) * r.norm_F;
}

}  // namespace evo
