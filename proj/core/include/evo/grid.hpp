#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <utility>

namespace evo {

/// Uniform time grid on [t_min, t_max] with n intervals (n+1 sample points).
struct TimeGrid {
    double t_min{0.0};
    double t_max{1.0};
    int n{2};

    TimeGrid() = default;
    TimeGrid(double t_min_, double t_max_, int n_) : t_min(t_min_), t_max(t_max_), n(n_) {
        if (n < 2) throw std::invalid_argument("TimeGrid: n must be >= 2");
        if (!(t_max > t_min)) throw std::invalid_argument("TimeGrid: t_max must exceed t_min");
    }

    double h() const { return (t_max - t_min) / n; }
    int points() const { return n + 1; }
    double t(int k) const { return t_min + k * h(); }

    bool operator==(const TimeGrid& other) const {
        return t_min == other.t_min && t_max == other.t_max && n == other.n;
    }
};

/// Exponential weight e^{-rho t} of the time axis; rho > 0 (forward-causal branch).
struct Weight {
    double rho{1.0};

    Weight() = default;
    explicit Weight(double rho_) : rho(rho_) {
        if (!(rho > 0.0)) throw std::invalid_argument("Weight: rho must be positive");
    }
};

/// A time-sampled vector-valued signal on a uniform grid. Column k holds the
/// state at t_k; signals are understood as zero-extended before t_min.
class Trajectory {
public:
    Trajectory(TimeGrid grid, int dim)
        : grid_(grid), values_(Eigen::MatrixXd::Zero(dim, grid.points())) {
        if (dim < 1) throw std::invalid_argument("Trajectory: dim must be positive");
    }

    Trajectory(TimeGrid grid, Eigen::MatrixXd values) : grid_(grid), values_(std::move(values)) {
        if (values_.cols() != grid_.points())
            throw std::invalid_argument("Trajectory: values must have n+1 columns");
        if (values_.rows() < 1) throw std::invalid_argument("Trajectory: dim must be positive");
    }

    static Trajectory zero(TimeGrid grid, int dim) { return Trajectory(grid, dim); }

    /// Sample a function t -> vector on the grid.
    static Trajectory sample(TimeGrid grid, int dim,
                             const std::function<Eigen::VectorXd(double)>& f) {
        Trajectory u(grid, dim);
        for (int k = 0; k <= grid.n; ++k) u.col(k) = f(grid.t(k));
        return u;
    }

    /// Sample a scalar function (dim 1).
    static Trajectory sample_scalar(TimeGrid grid, const std::function<double(double)>& f) {
        Trajectory u(grid, 1);
        for (int k = 0; k <= grid.n; ++k) u.values_(0, k) = f(grid.t(k));
        return u;
    }

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return static_cast<int>(values_.rows()); }
    int points() const { return grid_.points(); }

    Eigen::MatrixXd& values() { return values_; }
    const Eigen::MatrixXd& values() const { return values_; }

    Eigen::MatrixXd::ColXpr col(int k) { return values_.col(k); }
    Eigen::MatrixXd::ConstColXpr col(int k) const { return values_.col(k); }

    bool same_shape(const Trajectory& other) const {
        return grid_ == other.grid_ && dim() == other.dim();
    }

    Trajectory& operator+=(const Trajectory& o) {
        require_shape(o);
        values_ += o.values_;
        return *this;
    }
    Trajectory& operator-=(const Trajectory& o) {
        require_shape(o);
        values_ -= o.values_;
        return *this;
    }
    Trajectory& operator*=(double s) {
        values_ *= s;
        return *this;
    }

    friend Trajectory operator+(Trajectory a, const Trajectory& b) { return a += b; }
    friend Trajectory operator-(Trajectory a, const Trajectory& b) { return a -= b; }
    friend Trajectory operator*(double s, Trajectory a) { return a *= s; }

    void require_shape(const Trajectory& o) const {
        if (!same_shape(o)) throw std::invalid_argument("Trajectory: grid/dim mismatch");
    }

private:
    TimeGrid grid_;
    Eigen::MatrixXd values_;  // dim x (n+1)
};

}  // namespace evo
