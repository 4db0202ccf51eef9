#pragma once

#include "evo/grid.hpp"

#include <iosfwd>
#include <string>

namespace evo {

/// Trajectory CSV: header `t,v0,...,v{d-1}`, one row per grid point, at least
/// 15 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& u);
void write_trajectory_csv(const std::string& path, const Trajectory& u);

/// Reads the format written above; the grid is reconstructed from the t
/// column (uniform spacing enforced).
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace evo
