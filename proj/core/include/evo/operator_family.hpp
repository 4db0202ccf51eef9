#pragma once

#include "evo/grid.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace evo {

using MatrixSampler = std::function<Eigen::MatrixXd(double)>;

/// A time-dependent d x d operator t -> M(t) with optional analytic derivative
/// and Lipschitz data. Samplers must be pure; families with declared
/// breakpoints report derivative 0 there (the null set of the hypotheses).
struct OperatorFamily {
    int dim{0};
    MatrixSampler sampler;
    MatrixSampler derivative_sampler;          // optional; null means finite differences
    std::optional<double> lipschitz_hint;
    std::vector<double> breakpoints;
    bool piecewise_constant{false};

    Eigen::MatrixXd at(double t) const { return sampler(t); }

    /// Analytic derivative if supplied, 0 at declared breakpoints, else a
    /// central difference with step h_d = 1e-6 * max(1, |t|).
    Eigen::MatrixXd derivative_at(double t) const;

    bool is_breakpoint(double t) const;

    static OperatorFamily constant(const Eigen::MatrixXd& m);
    static OperatorFamily zero(int dim);
    static OperatorFamily identity(int dim);

    /// M(t) = offset + phi-like scalar(t) * scale, with analytic derivative
    /// scalar'(t) * scale.
    static OperatorFamily scalar_pencil(std::function<double(double)> scalar,
                                        std::function<double(double)> scalar_derivative,
                                        Eigen::MatrixXd scale, Eigen::MatrixXd offset,
                                        std::vector<double> breakpoints = {});
};

struct SelfAdjointReport {
    bool ok{false};
    double max_asymmetry{0.0};
};

struct NonNegativeReport {
    bool ok{false};
    double min_eigenvalue{0.0};
    bool symmetrized_warning{false};  // set when the input was not selfadjoint
};

/// Hypothesis (a): max over samples of the spectral norm of M(t) - M(t)^T.
SelfAdjointReport check_selfadjoint(const OperatorFamily& m, const std::vector<double>& t_samples,
                                    double tol);

/// Hypothesis (b): min eigenvalue of the symmetrized part over samples >= -tol.
NonNegativeReport check_nonnegative(const OperatorFamily& m, const std::vector<double>& t_samples,
                                    double tol);

/// Hypothesis (c): sampled lower bound on |M|_Lip; lipschitz_hint overrides.
double estimate_lipschitz(const OperatorFamily& m, const std::vector<double>& t_samples);

/// Pointwise-in-time application (M(m_0) u)(t_k) = M(t_k) u(t_k).
Trajectory multiply(const OperatorFamily& m, const Trajectory& u);

/// Evenly spaced sample times covering a grid (one per grid point by default).
std::vector<double> sample_times(const TimeGrid& grid, int count = 0);

}  // namespace evo
