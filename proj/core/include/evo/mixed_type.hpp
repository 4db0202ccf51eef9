#pragma once

#include "evo/solver.hpp"

#include <string>
#include <vector>

namespace evo {

/// The ramp 0 for t <= 0, t on ]0,1], 1 after; derivative 1 on ]0,1[ and 0
/// elsewhere (breakpoints {0,1} count as 0).
double phi(double t);
double phi_derivative(double t);

/// 1+1-D two-field system on ]-L,L[ whose type switches between hyperbolic,
/// elliptic and parabolic across the cells; the nonautonomous variant also
/// degenerates in time through phi.
struct MixedTypeConfig {
    double epsilon{0.25};  // half-width of the switching region
    double L{1.0};
    int m{16};
    bool nonautonomous{false};

    void validate() const;
    double dx() const { return 2.0 * L / m; }
    double cell_center(int j) const { return -L + (j + 0.5) * dx(); }
};

/// Per-cell type label for the u-field: "hyperbolic", "elliptic" or
/// "parabolic" by the spatial region the cell center falls in.
std::vector<std::string> region_types(const MixedTypeConfig& cfg);

/// Assembles the 2m-dimensional problem: M0(t) = (phi(t) if nonautonomous)
/// * diag of region indicators, M1(t) the complementary indicators (switched
/// on at t = 0 in the nonautonomous variant), A the block-skew difference
/// pair. F must have dim 2m.
EvoProblem build_mixed_type(const MixedTypeConfig& cfg, const Weight& w, const TimeGrid& grid,
                            const Trajectory& F);

}  // namespace evo
