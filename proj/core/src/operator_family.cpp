#include "evo/operator_family.hpp"

#include <cmath>
#include <stdexcept>

namespace evo {

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
    return m.jacobiSvd().singularValues()(0);
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

bool OperatorFamily::is_breakpoint(double t) const {
    for (double b : breakpoints)
        if (std::abs(t - b) <= 1e-12 * std::max(1.0, std::abs(b))) return true;
    return false;
}

Eigen::MatrixXd OperatorFamily::derivative_at(double t) const {
    if (is_breakpoint(t)) return Eigen::MatrixXd::Zero(dim, dim);
    if (derivative_sampler) return derivative_sampler(t);
    const double hd = 1e-6 * std::max(1.0, std::abs(t));
    return (sampler(t + hd) - sampler(t - hd)) / (2.0 * hd);
}

OperatorFamily OperatorFamily::constant(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("OperatorFamily: matrix must be square");
    OperatorFamily fam;
    fam.dim = static_cast<int>(m.rows());
    fam.sampler = [m](double) { return m; };
    fam.derivative_sampler = [d = fam.dim](double) { return Eigen::MatrixXd::Zero(d, d); };
    fam.lipschitz_hint = 0.0;
    fam.piecewise_constant = true;
    return fam;
}

OperatorFamily OperatorFamily::zero(int dim) {
    return constant(Eigen::MatrixXd::Zero(dim, dim));
}

OperatorFamily OperatorFamily::identity(int dim) {
    return constant(Eigen::MatrixXd::Identity(dim, dim));
}

OperatorFamily OperatorFamily::scalar_pencil(std::function<double(double)> scalar,
                                             std::function<double(double)> scalar_derivative,
                                             Eigen::MatrixXd scale, Eigen::MatrixXd offset,
                                             std::vector<double> breakpoints) {
    if (scale.rows() != scale.cols() || offset.rows() != offset.cols() ||
        scale.rows() != offset.rows())
        throw std::invalid_argument("scalar_pencil: scale/offset must be square and same size");
    OperatorFamily fam;
    fam.dim = static_cast<int>(scale.rows());
    fam.sampler = [scalar, scale, offset](double t) -> Eigen::MatrixXd {
        return offset + scalar(t) * scale;
    };
    fam.derivative_sampler = [scalar_derivative, scale](double t) -> Eigen::MatrixXd {
        return scalar_derivative(t) * scale;
    };
    fam.breakpoints = std::move(breakpoints);
    return fam;
}

SelfAdjointReport check_selfadjoint(const OperatorFamily& m, const std::vector<double>& t_samples,
                                    double tol) {
    if (tol < 0.0) throw std::invalid_argument("check_selfadjoint: tol must be nonnegative");
    double worst = 0.0;
    for (double t : t_samples) {
        const Eigen::MatrixXd mt = m.at(t);
        worst = std::max(worst, spectral_norm(mt - mt.transpose()));
    }
    return {worst <= tol, worst};
}

NonNegativeReport check_nonnegative(const OperatorFamily& m, const std::vector<double>& t_samples,
                                    double tol) {
    NonNegativeReport report;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    const SelfAdjointReport sa = check_selfadjoint(m, t_samples, 1e-10);
    report.symmetrized_warning = !sa.ok;
    for (double t : t_samples) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m.at(t)),
                                                          Eigen::EigenvaluesOnly);
        report.min_eigenvalue = std::min(report.min_eigenvalue, es.eigenvalues()(0));
    }
    report.ok = report.min_eigenvalue >= -tol;
    return report;
}

double estimate_lipschitz(const OperatorFamily& m, const std::vector<double>& t_samples) {
    if (m.lipschitz_hint) return *m.lipschitz_hint;
    if (t_samples.size() < 2)
        throw std::invalid_argument("estimate_lipschitz: need at least 2 samples");
    double worst = 0.0;
    Eigen::MatrixXd prev = m.at(t_samples.front());
    for (std::size_t k = 1; k < t_samples.size(); ++k) {
        const Eigen::MatrixXd cur = m.at(t_samples[k]);
        const double dt = t_samples[k] - t_samples[k - 1];
        if (dt > 0.0) worst = std::max(worst, spectral_norm(cur - prev) / dt);
        prev = cur;
    }
    return worst;
}

Trajectory multiply(const OperatorFamily& m, const Trajectory& u) {
    if (m.dim != u.dim()) throw std::invalid_argument("multiply: dim mismatch");
    Trajectory out(u.grid(), u.dim());
    for (int k = 0; k < u.points(); ++k) out.col(k) = m.at(u.grid().t(k)) * u.col(k);
    return out;
}

std::vector<double> sample_times(const TimeGrid& grid, int count) {
    if (count <= 0) count = grid.points();
    std::vector<double> ts(count);
    for (int k = 0; k < count; ++k)
        ts[k] = grid.t_min + (grid.t_max - grid.t_min) * k / double(count - 1);
    return ts;
}

}  // namespace evo
