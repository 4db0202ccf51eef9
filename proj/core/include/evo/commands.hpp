#pragma once

#include "evo/config.hpp"

#include <iosfwd>

namespace evo {

/// Stable exit code contract: 0 ok, 1 config, 2 certificate, 3 solve,
/// 4 verification.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kCertificateError = 2,
    kSolveError = 3,
    kVerificationError = 4,
};

struct CommandOptions {
    bool quiet{false};
    bool emit_plot_data{false};
};

/// Certificate report: prints rho0, c0 and the worst witness; writes
/// check_summary.txt to the output directory.
int cmd_check(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt = {});

/// Solves (fixed-point iteration when a perturbation is configured) and
/// writes solution.csv, report.txt, solve_summary.txt and, with a
/// perturbation, iterations.csv.
int cmd_solve(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt = {});

/// Runs the configured verification checks (causality, norm_bound, energy,
/// adjoint, oracle) and prints a pass/fail table; exit 0 only if all pass.
int cmd_verify(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt = {});

/// One row per rho: rho, c0, bound_ratio, tail_norm, contraction_ratio.
/// Requires at least 2 rho values; per-rho failures become rows, not aborts.
int cmd_sweep_rho(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt = {});

}  // namespace evo
