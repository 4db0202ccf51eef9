#include "evo/commands.hpp"

#include "evo/csv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace evo {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << std::setprecision(17);
    return os;
}

Trajectory random_trajectory(const TimeGrid& grid, int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Trajectory u(grid, dim);
    for (int k = 0; k <= grid.n; ++k)
        for (int i = 0; i < dim; ++i) u.col(k)(i) = gauss(rng);
    return u;
}

double range_minimum(const OperatorFamily& m0, const OperatorFamily& m1, double rho,
                     const std::vector<double>& all, double lo, double hi) {
    std::vector<double> picked;
    for (double t : all)
        if (t > lo && t <= hi) picked.push_back(t);
    if (picked.empty()) return std::numeric_limits<double>::quiet_NaN();
    return posdef_min_eigenvalue(m0, m1, rho, picked, nullptr);
}

struct VerifyRow {
    std::string name;
    bool pass{false};
    double measured{0.0};
    double threshold{0.0};
    std::string note;
};

}  // namespace

int cmd_check(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt) {
    try {
        const EvoProblem p = cfg.assemble().p;
        const std::vector<double> ts = sample_times(cfg.grid);

        const SelfAdjointReport sa = check_selfadjoint(p.M0, ts, 1e-10);
        if (!sa.ok) {
            os << "FAIL selfadjointness of M0 (max asymmetry " << sa.max_asymmetry << ")\n";
            return kCertificateError;
        }
        const NonNegativeReport nn = check_nonnegative(p.M0, ts, 1e-10);
        if (!nn.ok) {
            os << "FAIL nonnegativity of M0 (min eigenvalue " << nn.min_eigenvalue << ")\n";
            return kCertificateError;
        }

        const CertificateResult result = posdef_certificate(p.M0, p.M1, cfg.rho_values, ts);
        auto summary = open_out(cfg, "check_summary.txt");
        if (!result.ok()) {
            os << "FAIL no certificate on the configured rho values (worst eigenvalue "
               << result.worst.min_eigenvalue << " at t=" << result.worst.t
               << ", rho=" << result.worst.rho << ")\n";
            summary << "ok=0\nworst_t=" << result.worst.t
                    << "\nworst_eig=" << result.worst.min_eigenvalue << "\n";
            return kCertificateError;
        }
        const PosDefCertificate& cert = *result.cert;
        if (!opt.quiet) {
            os << "certificate: rho0=" << cert.rho0 << " c0=" << cert.c0 << "\n";
            const double lo = cfg.grid.t_min - 1.0;
            os << "range minima: (-inf,0]=" << std::setprecision(12)
               << range_minimum(p.M0, p.M1, cert.rho0, cert.t_samples, lo, 0.0)
               << " (0,1]=" << range_minimum(p.M0, p.M1, cert.rho0, cert.t_samples, 0.0, 1.0)
               << " (1,inf)=" << range_minimum(p.M0, p.M1, cert.rho0, cert.t_samples, 1.0,
                                               cfg.grid.t_max + 1.0)
               << "\n";
        }
        summary << "ok=1\nrho0=" << cert.rho0 << "\nc0=" << cert.c0 << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        os << "config: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionError& e) {
        os << "certificate: " << e.what() << "\n";
        return kCertificateError;
    }
}

int cmd_solve(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt) {
    try {
        RunConfig::Assembled a = cfg.assemble();
        std::vector<IterationRecord> log;
        SolveReport report = [&]() -> SolveReport {
            if (a.minf && a.V) {
                SubspacePerturbedReport r =
                    subspace_perturbed_solve(a.p, *a.minf, *a.V, 0.5, 1e-10, 200);
                if (!opt.quiet)
                    os << "subspace iteration: iters=" << r.iters << " ratio=" << r.ratio
                       << " rho=" << r.rho_used << "\n";
                const Weight w{r.rho_used};
                const double nu = weighted_norm(r.u, w);
                const double nf = weighted_norm(a.p.F, w);
                return {std::move(r.u), nu, nf, r.ratio, {}, 0.0, 0.0};
            }
            if (a.minf) {
                FixedPointReport r = fixed_point_solve(a.p, *a.minf, 1e-10, 200);
                if (!opt.quiet)
                    os << "iteration: iters=" << r.iters << " ratio=" << r.ratio << "\n";
                log = std::move(r.log);
                const double nu = weighted_norm(r.u, a.p.w);
                const double nf = weighted_norm(a.p.F, a.p.w);
                const double c0 = a.p.require_certificate().c0;
                return {std::move(r.u), nu, nf, nf > 0.0 ? nu * c0 / nf : 0.0, {}, 0.0, 0.0};
            }
            return solve(a.p);
        }();

        fs::create_directories(cfg.output_dir);
        write_trajectory_csv((fs::path(cfg.output_dir) / "solution.csv").string(), report.u);
        {
            auto rep = open_out(cfg, "report.txt");
            rep << "norm_u " << report.norm_u << "\nnorm_F " << report.norm_F
                << "\nbound_ratio " << report.bound_ratio << "\ncausality_defect "
                << report.causality_defect << "\nstep_accretivity_min "
                << report.step_accretivity_min << "\n";
            for (double r : report.energy_residuals) rep << "energy_residual " << r << "\n";
        }
        {
            auto summary = open_out(cfg, "solve_summary.txt");
            summary << "ok=1\nnorm_u=" << report.norm_u << "\nnorm_F=" << report.norm_F
                    << "\nbound_ratio=" << report.bound_ratio << "\n";
        }
        if (!log.empty()) {
            auto it = open_out(cfg, "iterations.csv");
            it << "iter,delta_norm,ratio\n";
            for (const IterationRecord& r : log)
                it << r.iter << "," << r.delta_norm << "," << r.ratio << "\n";
        }
        if (opt.emit_plot_data) {
            auto plot = open_out(cfg, "plot_data.csv");
            plot << "t,norm\n";
            for (int k = 0; k <= cfg.grid.n; ++k)
                plot << cfg.grid.t(k) << "," << report.u.col(k).norm() << "\n";
        }
        if (!opt.quiet) os << "norm_u=" << report.norm_u << " norm_F=" << report.norm_F << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        os << "config: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionError& e) {
        os << "certificate: " << e.what() << "\n";
        return kCertificateError;
    } catch (const SolveError& e) {
        os << "solve: " << e.what() << "\n";
        return kSolveError;
    }
}

int cmd_verify(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt) {
    try {
        const EvoProblem base = cfg.assemble().p;
        std::mt19937_64 rng(cfg.seed);
        std::vector<VerifyRow> rows;

        for (const std::string& check : cfg.verifications) {
            VerifyRow row;
            row.name = check;
            if (check == "causality") {
                row.threshold = 1e-12;
                double worst = 0.0;
                for (int trial = 0; trial < 5; ++trial) {
                    EvoProblem p = base;
                    p.F = random_trajectory(cfg.grid, p.dim(), rng);
                    const double a =
                        cfg.grid.t_min + (0.3 + 0.1 * trial) * (cfg.grid.t_max - cfg.grid.t_min);
                    worst = std::max(worst, verify_causality(p, a));
                }
                row.measured = worst;
                row.pass = worst <= row.threshold;
            } else if (check == "norm_bound") {
                const SolveReport r = solve(base);
                const PosDefCertificate cert = base.require_certificate();
                row.measured = r.bound_ratio;
                row.threshold = 1.1;
                row.pass = verify_norm_bound(r, cert, 0.1);
            } else if (check == "energy") {
                const Trajectory u = solve(base).u;
                double coarse = 0.0;
                for (double frac : {0.25, 0.5, 0.75})
                    coarse = std::max(
                        coarse, energy_identity_residual(
                                    base, u, cfg.grid.t_min + frac * (cfg.grid.t_max - cfg.grid.t_min)));
                row.measured = coarse;
                bool refined_ok = false;
                try {
                    RunConfig fine_cfg = cfg;
                    fine_cfg.grid = TimeGrid{cfg.grid.t_min, cfg.grid.t_max, 2 * cfg.grid.n};
                    const EvoProblem fine = fine_cfg.assemble().p;
                    const Trajectory uf = solve(fine).u;
                    double fine_max = 0.0;
                    for (double frac : {0.25, 0.5, 0.75})
                        fine_max = std::max(fine_max,
                                            energy_identity_residual(
                                                fine, uf,
                                                cfg.grid.t_min +
                                                    frac * (cfg.grid.t_max - cfg.grid.t_min)));
                    row.threshold = coarse / 1.2;
                    refined_ok = fine_max <= row.threshold || fine_max < 1e-12;
                    row.note = "refined residual " + std::to_string(fine_max);
                } catch (const std::exception&) {
                    row.threshold = 1e-6;
                    refined_ok = coarse <= row.threshold;
                    row.note = "refinement unavailable, absolute check";
                }
                row.pass = refined_ok;
            } else if (check == "adjoint") {
                row.threshold = 1e-10;
                double worst = 0.0;
                for (int trial = 0; trial < 20; ++trial) {
                    const Trajectory u = random_trajectory(cfg.grid, base.dim(), rng);
                    const Trajectory v = random_trajectory(cfg.grid, base.dim(), rng);
                    const double lhs = weighted_inner(apply_operator(base, u), v, base.w);
                    const double rhs = weighted_inner(u, apply_adjoint_operator(base, v), base.w);
                    const double scale =
                        1.0 + weighted_norm(u, base.w) * weighted_norm(v, base.w);
                    worst = std::max(worst, std::abs(lhs - rhs) / scale);
                }
                row.measured = worst;
                row.pass = worst <= row.threshold;
            } else if (check == "oracle") {
                row.threshold = 1e-10;
                if (static_cast<long>(cfg.grid.points()) * base.dim() > 4096) {
                    row.pass = true;
                    row.note = "skipped (desk-scale guard)";
                } else {
                    const Trajectory um = solve(base).u;
                    const Trajectory ud = oracle_dense_solve(base);
                    double worst = 0.0;
                    double scale = 1.0;
                    for (int k = 0; k <= cfg.grid.n; ++k) {
                        worst = std::max(worst, (um.col(k) - ud.col(k)).cwiseAbs().maxCoeff());
                        scale = std::max(scale, ud.col(k).cwiseAbs().maxCoeff());
                    }
                    row.measured = worst / scale;
                    row.pass = row.measured <= row.threshold;
                }
            } else {
                throw ConfigError("unknown verification check " + check);
            }
            rows.push_back(std::move(row));
        }

        bool all_pass = true;
        auto table = open_out(cfg, "verify_summary.txt");
        for (const VerifyRow& row : rows) {
            all_pass = all_pass && row.pass;
            if (!opt.quiet)
                os << (row.pass ? "PASS " : "FAIL ") << row.name << " measured=" << row.measured
                   << " threshold=" << row.threshold
                   << (row.note.empty() ? "" : " (" + row.note + ")") << "\n";
            table << row.name << "=" << (row.pass ? 1 : 0) << "\n";
            if (!row.pass) os << "verification failed: " << row.name << "\n";
        }
        return all_pass ? kOk : kVerificationError;
    } catch (const ConfigError& e) {
        os << "config: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionError& e) {
        os << "certificate: " << e.what() << "\n";
        return kCertificateError;
    } catch (const SolveError& e) {
        os << "solve: " << e.what() << "\n";
        return kSolveError;
    }
}

int cmd_sweep_rho(const RunConfig& cfg, std::ostream& os, const CommandOptions& opt) {
    try {
        if (cfg.rho_values.size() < 2)
            throw ConfigError("sweep needs at least 2 rho values");

        struct Row {
            double rho, c0, bound_ratio, tail_norm, contraction_ratio;
        };
        const double nan = std::numeric_limits<double>::quiet_NaN();

        auto run_row = [&cfg, nan](double rho) -> Row {
            Row row{rho, nan, nan, nan, nan};
            try {
                const Weight w{rho};
                RunConfig::Assembled a = cfg.assemble(w);
                const std::vector<double> ts = sample_times(cfg.grid);
                const CertificateResult cr = posdef_certificate(a.p.M0, a.p.M1, {rho}, ts);
                if (cr.ok()) row.c0 = cr.cert->c0;

                if (cfg.example_type == "kelvin-voigt") {
                    const KelvinVoigtConfig kv =
                        cfg.kv_preset == "purely_viscous"
                            ? KelvinVoigtConfig::purely_viscous(cfg.kv_m, cfg.kv_dx)
                            : KelvinVoigtConfig::reference(cfg.kv_m, cfg.kv_dx);
                    row.tail_norm = neumann_tail_norm(kv, w, cfg.grid);
                    if (a.minf) row.contraction_ratio = a.minf->norm_estimate(w);
                    return row;
                }
                if (a.minf && cr.ok()) {
                    const FixedPointReport r = fixed_point_solve(a.p, *a.minf, 1e-10, 200);
                    row.contraction_ratio = r.ratio;
                    row.bound_ratio = weighted_norm(r.u, w) * cr.cert->c0 /
                                      std::max(weighted_norm(a.p.F, w), 1e-300);
                } else if (cr.ok()) {
                    row.bound_ratio = solve(a.p).bound_ratio;
                }
            } catch (const std::exception&) {
                // Per-rho failures stay as nan rows.
            }
            return row;
        };

        std::vector<std::future<Row>> futures;
        for (double rho : cfg.rho_values)
            futures.push_back(std::async(std::launch::async, run_row, rho));
        std::vector<Row> rows;
        for (auto& f : futures) rows.push_back(f.get());

        auto csv = open_out(cfg, "sweep.csv");
        csv << "rho,c0,bound_ratio,tail_norm,contraction_ratio\n";
        for (const Row& r : rows)
            csv << r.rho << "," << r.c0 << "," << r.bound_ratio << "," << r.tail_norm << ","
                << r.contraction_ratio << "\n";

        auto non_increasing = [&rows](double Row::* field) {
            bool ok = true;
            for (size_t i = 1; i < rows.size(); ++i) {
                const double a = rows[i - 1].*field;
                const double b = rows[i].*field;
                if (std::isnan(a) || std::isnan(b)) continue;
                ok = ok && b <= a + 1e-12;
            }
            return ok;
        };
        if (!opt.quiet) {
            for (const Row& r : rows)
                os << "rho=" << r.rho << " c0=" << r.c0 << " bound_ratio=" << r.bound_ratio
                   << " tail_norm=" << r.tail_norm << " contraction_ratio=" << r.contraction_ratio
                   << "\n";
            os << "contraction_ratio non-increasing: "
               << (non_increasing(&Row::contraction_ratio) ? "yes" : "no") << "\n";
            os << "tail_norm non-increasing: " << (non_increasing(&Row::tail_norm) ? "yes" : "no")
               << "\n";
        }
        return kOk;
    } catch (const ConfigError& e) {
        os << "config: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace evo
