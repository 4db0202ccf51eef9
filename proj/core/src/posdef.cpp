#include "evo/posdef.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evo {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double min_eig(const Eigen::MatrixXd& sym) {
    if (sym.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace

std::vector<double> default_rho_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(std::pow(2.0, k));
    return grid;
}

double posdef_min_eigenvalue(const OperatorFamily& m0, const OperatorFamily& m1, double rho,
                             const std::vector<double>& t_samples, CertificateWitness* worst) {
    if (m0.dim != m1.dim) throw std::invalid_argument("posdef: M0/M1 dim mismatch");
    double overall = std::numeric_limits<double>::infinity();
    for (double t : t_samples) {
        const Eigen::MatrixXd combo =
            rho * m0.at(t) + 0.5 * m0.derivative_at(t) + symmetrize(m1.at(t));
        const double lambda = min_eig(symmetrize(combo));
        if (lambda < overall) {
            overall = lambda;
            if (worst) *worst = {t, lambda, rho};
        }
    }
    return overall;
}

CertificateResult posdef_certificate(const OperatorFamily& m0, const OperatorFamily& m1,
                                     const std::vector<double>& rho_grid,
                                     const std::vector<double>& t_samples, double tol) {
    CertificateResult result;
    result.worst.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (double rho : rho_grid) {
        CertificateWitness witness;
        const double c0 = posdef_min_eigenvalue(m0, m1, rho, t_samples, &witness);
        if (c0 > tol) {
            PosDefCertificate cert;
            cert.rho0 = rho;
            cert.c0 = c0;
            cert.t_samples = t_samples;
            cert.witness.reserve(t_samples.size());
            for (double t : t_samples) {
                const Eigen::MatrixXd combo =
                    rho * m0.at(t) + 0.5 * m0.derivative_at(t) + symmetrize(m1.at(t));
                cert.witness.push_back(min_eig(symmetrize(combo)));
            }
            result.cert = std::move(cert);
            return result;
        }
        if (witness.min_eigenvalue < result.worst.min_eigenvalue) result.worst = witness;
    }
    return result;
}

SubspaceCertificateResult subspace_posdef_certificate(const OperatorFamily& m0,
                                                      const OperatorFamily& m1,
                                                      const SubspaceProjector& v,
                                                      const std::vector<double>& t_samples,
                                                      double tol) {
    SubspaceCertificateResult result;
    if (m0.dim != v.dim() || m1.dim != v.dim()) {
        result.error = "subspace certificate: dim mismatch";
        return result;
    }

    // V must be the (time-invariant) null space of M0.
    for (double t : t_samples) {
        const double leak = (m0.at(t) * v.basis()).norm();
        if (leak > tol * std::max(1.0, m0.at(t).norm())) {
            result.error = "V is not the time-invariant null space of M0";
            result.worst = {t, leak, 0.0};
            return result;
        }
    }

    double c0 = std::numeric_limits<double>::infinity();
    double c1 = std::numeric_limits<double>::infinity();
    CertificateWitness worst{0.0, std::numeric_limits<double>::infinity(), 0.0};
    for (double t : t_samples) {
        const Eigen::MatrixXd re_m1_v =
            v.basis().transpose() * symmetrize(m1.at(t)) * v.basis();
        const double e0 = min_eig(symmetrize(re_m1_v));
        if (e0 < c0) {
            c0 = e0;
            if (e0 < worst.min_eigenvalue) worst = {t, e0, 0.0};
        }
        if (v.rank() < v.dim()) {
            const Eigen::MatrixXd m0_perp =
                v.complement().transpose() * m0.at(t) * v.complement();
            const double e1 = min_eig(symmetrize(m0_perp));
            if (e1 < c1) {
                c1 = e1;
                if (e1 < worst.min_eigenvalue) worst = {t, e1, 0.0};
            }
        }
    }
    if (c0 <= tol || c1 <= tol) {
        result.error = "subspace coercivity constants not positive";
        result.worst = worst;
        return result;
    }
    result.cert = SubspaceCertificate{c0, c1};
    return result;
}

}  // namespace evo
