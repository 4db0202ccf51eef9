#pragma once

#include "evo/operator_family.hpp"
#include "evo/subspace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace evo {

/// Numerical evidence that rho*M0(t) + 1/2*dM0(t) + Re M1(t) >= c0 on the
/// sampled times for every checked rho >= rho0.
struct PosDefCertificate {
    double rho0{0.0};
    double c0{0.0};
    std::vector<double> t_samples;
    std::vector<double> witness;  // per-sample minimum eigenvalues at rho0
};

struct CertificateWitness {
    double t{0.0};
    double min_eigenvalue{0.0};
    double rho{0.0};
};

struct CertificateResult {
    std::optional<PosDefCertificate> cert;
    CertificateWitness worst;  // most negative sample seen (diagnostic on failure)

    bool ok() const { return cert.has_value(); }
};

/// Default geometric rho sweep 2^0 .. 2^10.
std::vector<double> default_rho_grid();

/// Minimum eigenvalue over t_samples of sym(rho*M0(t) + 1/2*dM0(t) + Re M1(t)).
double posdef_min_eigenvalue(const OperatorFamily& m0, const OperatorFamily& m1, double rho,
                             const std::vector<double>& t_samples,
                             CertificateWitness* worst = nullptr);

/// Returns the smallest rho on the grid whose sampled minimum eigenvalue
/// exceeds tol; c0 is that minimum. Failure carries the worst witness.
CertificateResult posdef_certificate(const OperatorFamily& m0, const OperatorFamily& m1,
                                     const std::vector<double>& rho_grid,
                                     const std::vector<double>& t_samples, double tol = 1e-10);

struct SubspaceCertificate {
    double c0{0.0};  // min eig of iota_V^* Re M1(t) iota_V over samples
    double c1{0.0};  // min eig of iota_{V_perp}^* M0(t) iota_{V_perp} over samples
};

struct SubspaceCertificateResult {
    std::optional<SubspaceCertificate> cert;
    std::string error;
    CertificateWitness worst;

    bool ok() const { return cert.has_value(); }
};

/// Certificate for the subspace coercivity conditions used by the
/// degenerate-M0 solve path (subspace_perturbed_solve).
/// Precondition (checked): V is the time-invariant null space of M0, i.e.
/// ||M0(t) iota_V|| <= tol at every sample.
SubspaceCertificateResult subspace_posdef_certificate(const OperatorFamily& m0,
                                                      const OperatorFamily& m1,
                                                      const SubspaceProjector& v,
                                                      const std::vector<double>& t_samples,
                                                      double tol = 1e-10);

}  // namespace evo
