#include "evo/commands.hpp"
#include "evo/csv.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    unsigned long long seed = 0;
    bool seed_set = false;
    bool emit_plot_data = false;
    bool quiet = false;
};

void add_common(CLI::App* sub, GlobalArgs& args) {
    sub->add_option("--config", args.config_path, "Run configuration file")->required();
    sub->add_option("--out", args.out_dir, "Output directory override");
    sub->add_option("--seed", args.seed, "Seed override for randomized checks")
        ->each([&args](const std::string&) { args.seed_set = true; });
    sub->add_flag("--emit-plot-data", args.emit_plot_data, "Also write per-time norm columns");
    sub->add_flag("--quiet", args.quiet, "Suppress progress output");
}

int load_and_run(const GlobalArgs& args,
                 const std::function<int(evo::RunConfig&, const evo::CommandOptions&)>& fn) {
    try {
        evo::RunConfig cfg = evo::load_config(args.config_path);
        if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
        if (args.seed_set) cfg.seed = args.seed;
        evo::CommandOptions opt;
        opt.quiet = args.quiet;
        opt.emit_plot_data = args.emit_plot_data;
        return fn(cfg, opt);
    } catch (const evo::ConfigError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return evo::kConfigError;
    }
}

int run_example(evo::RunConfig& cfg, const evo::CommandOptions& opt, const std::string& kind) {
    cfg.example_type = kind;
    const int check_rc = evo::cmd_check(cfg, std::cout, opt);
    // A missing full-space certificate is expected for the degenerate model;
    // the subspace solve path supplies its own constants.
    if (check_rc != evo::kOk && kind != "kelvin-voigt") return check_rc;

    if (kind == "mixed-type") {
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream map(std::filesystem::path(cfg.output_dir) / "region_map.csv");
        map << "cell,x,type\n";
        const std::vector<std::string> types = evo::region_types(cfg.mixed);
        for (int j = 0; j < cfg.mixed.m; ++j)
            map << j << "," << cfg.mixed.cell_center(j) << "," << types[j] << "\n";
    }
    return evo::cmd_solve(cfg, std::cout, opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time solver for first-order evolutionary systems with "
                 "time-dependent coefficients"};
    app.require_subcommand(1);

    GlobalArgs args;
    CLI::App* check = app.add_subcommand("check", "Positive definiteness certificate report");
    CLI::App* solve = app.add_subcommand("solve", "Solve and write trajectory artifacts");
    CLI::App* verify = app.add_subcommand("verify", "Run the configured verification checks");
    CLI::App* sweep = app.add_subcommand("sweep-rho", "Weight sweep observables table");
    CLI::App* example = app.add_subcommand("example", "Built-in reference models");
    CLI::App* ex_mixed = example->add_subcommand("mixed-type", "Type-switching two-field model");
    CLI::App* ex_kv = example->add_subcommand("kelvin-voigt", "Visco-elastic solid model");
    example->require_subcommand(1);
    for (CLI::App* sub : {check, solve, verify, sweep, ex_mixed, ex_kv}) add_common(sub, args);

    CLI11_PARSE(app, argc, argv);

    if (check->parsed())
        return load_and_run(args, [](evo::RunConfig& cfg, const evo::CommandOptions& opt) {
            return evo::cmd_check(cfg, std::cout, opt);
        });
    if (solve->parsed())
        return load_and_run(args, [](evo::RunConfig& cfg, const evo::CommandOptions& opt) {
            return evo::cmd_solve(cfg, std::cout, opt);
        });
    if (verify->parsed())
        return load_and_run(args, [](evo::RunConfig& cfg, const evo::CommandOptions& opt) {
            return evo::cmd_verify(cfg, std::cout, opt);
        });
    if (sweep->parsed())
        return load_and_run(args, [](evo::RunConfig& cfg, const evo::CommandOptions& opt) {
            return evo::cmd_sweep_rho(cfg, std::cout, opt);
        });
    if (example->parsed()) {
        const std::string kind = ex_mixed->parsed() ? "mixed-type" : "kelvin-voigt";
        return load_and_run(args, [&kind](evo::RunConfig& cfg, const evo::CommandOptions& opt) {
            return run_example(cfg, opt, kind);
        });
    }
    return evo::kConfigError;
}
