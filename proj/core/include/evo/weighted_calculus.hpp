#pragma once

#include "evo/grid.hpp"

#include <Eigen/Dense>

#include <complex>

namespace evo {

/// Quadrature weights of the weighted inner product: h * e^{-2 rho t_k},
/// with trapezoid endpoint halving at k = 0 and k = n.
Eigen::VectorXd quad_weights(const TimeGrid& grid, const Weight& w);

/// <u|v>_rho = h * sum_k <u_k, v_k> e^{-2 rho t_k} (endpoint-halved).
double weighted_inner(const Trajectory& u, const Trajectory& v, const Weight& w);

double weighted_norm(const Trajectory& u, const Weight& w);

/// Causal backward difference: (u_k - u_{k-1})/h, with u_{-1} = 0
/// (zero extension before t_min).
Trajectory d0_apply(const Trajectory& u);

/// Causal cumulative integral v_k = h * sum_{j<=k} u_j. Exact left inverse of
/// d0_apply on the grid; discrete operator norm tends to 1/rho from below.
Trajectory d0_inv(const Trajectory& u);

/// The continuum adjoint formula -forward difference + 2 rho u (zero extension
/// past t_max). O(h)-consistent with the exact discrete adjoint.
Trajectory d0_star_apply(const Trajectory& u, const Weight& w);

/// Exact matrix adjoint of d0_apply under weighted_inner (including the
/// endpoint halving), realized directly on the samples.
Trajectory exact_weighted_adjoint(const Trajectory& u, const Weight& w);

/// Solves (1 + eps d0) v = u by a causal forward sweep.
Trajectory resolvent_eps(const Trajectory& u, double eps);

/// Zeroes all samples with t_k > a (the multiplier chi_{]-inf,a]}).
Trajectory cutoff(const Trajectory& u, double a);

/// Frequency-domain samples of the Fourier-Laplace transform. Mode m carries
/// the angular frequency omega[m]; values are dim x (n+1).
struct Spectrum {
    TimeGrid grid;
    Eigen::MatrixXcd values;
    Eigen::VectorXd omega;

    /// Frequency spacing 2*pi/((n+1)*h); the quadrature weight of the
    /// frequency-side norm.
    double domega() const { return 2.0 * M_PI / (grid.points() * grid.h()); }

    /// sqrt(domega * sum |values|^2); matches the time-side weighted norm for
    /// signals vanishing at the grid endpoints (see module docs).
    double norm() const;
};

/// Discrete Fourier-Laplace transform: multiply by e^{-rho t_k}, then apply
/// the DFT with the normalization
///     spec_m = (h / sqrt(2 pi)) * sum_k e^{-i omega_m k h} e^{-rho t_k} u_k,
/// omega_m = 2 pi m~ / ((n+1) h) with m~ the signed alias of m. With the
/// frequency-side quadrature weight domega = 2 pi/((n+1) h) this makes
/// Plancherel exact against the full-weight (non-halved) time quadrature.
Spectrum fourier_laplace(const Trajectory& u, const Weight& w);

/// Inverse of fourier_laplace; round-trip is identity to round-off.
Trajectory inverse_fourier_laplace(const Spectrum& s, const Weight& w);

/// Applies the continuum symbol of d0: inverse((i omega + rho) * transform(u)).
/// O(h)-consistent with d0_apply on band-limited, compactly supported u.
Trajectory d0_via_symbol(const Trajectory& u, const Weight& w);

}  // namespace evo
