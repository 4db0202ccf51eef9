#include "evo/weighted_calculus.hpp"

#include <cmath>

namespace evo {

Eigen::VectorXd quad_weights(const TimeGrid& grid, const Weight& w) {
    const int np = grid.points();
    const double h = grid.h();
    Eigen::VectorXd q(np);
    for (int k = 0; k < np; ++k) q(k) = h * std::exp(-2.0 * w.rho * grid.t(k));
    q(0) *= 0.5;
    q(np - 1) *= 0.5;
    return q;
}

double weighted_inner(const Trajectory& u, const Trajectory& v, const Weight& w) {
    u.require_shape(v);
    const Eigen::VectorXd q = quad_weights(u.grid(), w);
    double acc = 0.0;
    for (int k = 0; k < u.points(); ++k) acc += q(k) * u.col(k).dot(v.col(k));
    return acc;
}

double weighted_norm(const Trajectory& u, const Weight& w) {
    return std::sqrt(std::max(0.0, weighted_inner(u, u, w)));
}

Trajectory d0_apply(const Trajectory& u) {
    const double h = u.grid().h();
    Trajectory out(u.grid(), u.dim());
    out.col(0) = u.col(0) / h;
    for (int k = 1; k < u.points(); ++k) out.col(k) = (u.col(k) - u.col(k - 1)) / h;
    return out;
}

Trajectory d0_inv(const Trajectory& u) {
    const double h = u.grid().h();
    Trajectory out(u.grid(), u.dim());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.dim());
    for (int k = 0; k < u.points(); ++k) {
        acc += h * u.col(k);
        out.col(k) = acc;
    }
    return out;
}

Trajectory d0_star_apply(const Trajectory& u, const Weight& w) {
    const double h = u.grid().h();
    const int np = u.points();
    Trajectory out(u.grid(), u.dim());
    for (int k = 0; k < np - 1; ++k)
        out.col(k) = -(u.col(k + 1) - u.col(k)) / h + 2.0 * w.rho * u.col(k);
    out.col(np - 1) = u.col(np - 1) / h + 2.0 * w.rho * u.col(np - 1);
    return out;
}

Trajectory exact_weighted_adjoint(const Trajectory& u, const Weight& w) {
    // D* = Q^{-1} D^T Q with Q = diag(quad weights) and D the matrix of
    // d0_apply: D_{k,k} = 1/h, D_{k,k-1} = -1/h.
    const double h = u.grid().h();
    const int np = u.points();
    const Eigen::VectorXd q = quad_weights(u.grid(), w);
    Trajectory out(u.grid(), u.dim());
    for (int k = 0; k < np; ++k) {
        Eigen::VectorXd acc = q(k) * u.col(k) / h;
        if (k + 1 < np) acc -= q(k + 1) * u.col(k + 1) / h;
        out.col(k) = acc / q(k);
    }
    return out;
}

Trajectory resolvent_eps(const Trajectory& u, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("resolvent_eps: eps must be positive");
    const double h = u.grid().h();
    const double a = 1.0 + eps / h;
    const double b = eps / h;
    Trajectory out(u.grid(), u.dim());
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(u.dim());
    for (int k = 0; k < u.points(); ++k) {
        prev = (u.col(k) + b * prev) / a;
        out.col(k) = prev;
    }
    return out;
}

Trajectory cutoff(const Trajectory& u, double a) {
    Trajectory out = u;
    for (int k = 0; k < u.points(); ++k)
        if (u.grid().t(k) > a) out.col(k).setZero();
    return out;
}

double Spectrum::norm() const {
    return std::sqrt(domega() * values.squaredNorm());
}

namespace {

Eigen::VectorXd alias_frequencies(const TimeGrid& grid) {
    const int np = grid.points();
    const double base = 2.0 * M_PI / (np * grid.h());
    Eigen::VectorXd omega(np);
    for (int m = 0; m < np; ++m) {
        const int signed_m = (m <= np / 2) ? m : m - np;
        omega(m) = base * signed_m;
    }
    return omega;
}

}  // namespace

Spectrum fourier_laplace(const Trajectory& u, const Weight& w) {
    const int np = u.points();
    const double h = u.grid().h();
    const std::complex<double> i(0.0, 1.0);

    Eigen::MatrixXcd damped(u.dim(), np);
    for (int k = 0; k < np; ++k)
        damped.col(k) = u.col(k) * std::exp(-w.rho * u.grid().t(k));

    const double scale = h / std::sqrt(2.0 * M_PI);
    Eigen::MatrixXcd spec(u.dim(), np);
    for (int m = 0; m < np; ++m) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(u.dim());
        const double phase_step = -2.0 * M_PI * m / np;
        for (int k = 0; k < np; ++k)
            acc += damped.col(k) * std::exp(i * (phase_step * k));
        spec.col(m) = scale * acc;
    }
    return Spectrum{u.grid(), std::move(spec), alias_frequencies(u.grid())};
}

Trajectory inverse_fourier_laplace(const Spectrum& s, const Weight& w) {
    const int np = s.grid.points();
    const double h = s.grid.h();
    const std::complex<double> i(0.0, 1.0);
    const double scale = std::sqrt(2.0 * M_PI) / (np * h);

    Trajectory out(s.grid, static_cast<int>(s.values.rows()));
    for (int k = 0; k < np; ++k) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(s.values.rows());
        const double phase_step = 2.0 * M_PI * k / np;
        for (int m = 0; m < np; ++m)
            acc += s.values.col(m) * std::exp(i * (phase_step * m));
        out.col(k) = (scale * acc).real() * std::exp(w.rho * s.grid.t(k));
    }
    return out;
}

Trajectory d0_via_symbol(const Trajectory& u, const Weight& w) {
    Spectrum s = fourier_laplace(u, w);
    const std::complex<double> i(0.0, 1.0);
    for (int m = 0; m < s.grid.points(); ++m)
        s.values.col(m) *= (i * s.omega(m) + w.rho);
    return inverse_fourier_laplace(s, w);
}

}  // namespace evo
