#include "evo/mixed_type.hpp"

#include <stdexcept>

namespace evo {

double phi(double t) {
    if (t <= 0.0) return 0.0;
    if (t <= 1.0) return t;
    return 1.0;
}

double phi_derivative(double t) {
    return (t > 0.0 && t < 1.0) ? 1.0 : 0.0;
}

void MixedTypeConfig::validate() const {
    if (!(epsilon > 0.0)) throw PreconditionError("mixed type: epsilon must be positive");
    if (!(epsilon < L)) throw PreconditionError("mixed type: epsilon must be below L");
    if (m < 8) throw PreconditionError("mixed type: m must be >= 8");
}

namespace {

bool in_open(double x, double lo, double hi) { return x > lo && x < hi; }

/// diag(indicator_u(x_j), indicator_v(x_j)) for the two fields; the u-field
/// time-derivative weight vanishes on ]-eps,0[, the v-field one on ]-eps,eps[.
Eigen::MatrixXd indicator_diag(const MixedTypeConfig& cfg, bool complementary) {
    const int m = cfg.m;
    Eigen::VectorXd d(2 * m);
    for (int j = 0; j < m; ++j) {
        const double x = cfg.cell_center(j);
        const bool u_in = in_open(x, -cfg.epsilon, 0.0);
        const bool v_in = in_open(x, -cfg.epsilon, cfg.epsilon);
        d(j) = (u_in == complementary) ? 1.0 : 0.0;
        d(m + j) = (v_in == complementary) ? 1.0 : 0.0;
    }
    return d.asDiagonal();
}

}  // namespace

std::vector<std::string> region_types(const MixedTypeConfig& cfg) {
    std::vector<std::string> types;
    types.reserve(cfg.m);
    for (int j = 0; j < cfg.m; ++j) {
        const double x = cfg.cell_center(j);
        if (in_open(x, -cfg.epsilon, 0.0))
            types.push_back("elliptic");
        else if (in_open(x, 0.0, cfg.epsilon))
            types.push_back("parabolic");
        else
            types.push_back("hyperbolic");
    }
    return types;
}

EvoProblem build_mixed_type(const MixedTypeConfig& cfg, const Weight& w, const TimeGrid& grid,
                            const Trajectory& F) {
    cfg.validate();
    if (F.dim() != 2 * cfg.m)
        throw PreconditionError("mixed type: F must carry two fields (dim 2m)");
    if (&F.grid() != &grid && (F.grid().t_min != grid.t_min || F.grid().t_max != grid.t_max ||
                               F.grid().n != grid.n))
        throw PreconditionError("mixed type: F grid mismatch");

    const Eigen::MatrixXd m0_diag = indicator_diag(cfg, false);
    const Eigen::MatrixXd m1_diag = indicator_diag(cfg, true);
    const int d = 2 * cfg.m;

    OperatorFamily m0;
    OperatorFamily m1;
    if (cfg.nonautonomous) {
        m0 = OperatorFamily::scalar_pencil(phi, phi_derivative, m0_diag,
                                           Eigen::MatrixXd::Zero(d, d), {0.0, 1.0});
        m1.dim = d;
        // The switch keeps the identity at t = 0 itself so the certificate
        // bound >= 1 holds on the closed half-line (M0 still vanishes there).
        m1.sampler = [d, m1_diag](double t) {
            return t <= 0.0 ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d))
                            : Eigen::MatrixXd(m1_diag);
        };
        m1.derivative_sampler = [d](double) { return Eigen::MatrixXd::Zero(d, d); };
        m1.breakpoints = {0.0};
        m1.piecewise_constant = true;
    } else {
        m0 = OperatorFamily::constant(m0_diag);
        m1 = OperatorFamily::constant(m1_diag);
    }

    const SkewOperator a = make_block_skew(grad_1d_dirichlet(cfg.m, cfg.dx()));
    return EvoProblem{std::move(m0), std::move(m1), a, F, w, std::nullopt};
}

}  // namespace evo
