#pragma once

#include "evo/kelvin_voigt.hpp"
#include "evo/mixed_type.hpp"
#include "evo/perturbation.hpp"
#include "evo/solver.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One run of the pipeline, parsed from the versioned JSON schema
/// (schema_version 1). See docs/config.md for the field reference.
struct RunConfig {
    int schema_version{1};
    OperatorFamily M0;
    OperatorFamily M1;
    SkewOperator A{Eigen::MatrixXd::Zero(0, 0)};
    TimeGrid grid{0.0, 1.0, 2};
    std::vector<double> rho_values;  // one entry = fixed weight, more = sweep
    std::string forcing_type{"zero"};
    std::string forcing_csv;
    std::string perturbation_type{"none"};  // none | delay | convolution
    double delay_tau{0.0};
    std::string kernel_csv;
    std::vector<std::string> verifications;
    unsigned long long seed{0};
    std::string output_dir{"."};

    // Optional built-in model instead of explicit families.
    std::string example_type{"none"};  // none | mixed-type | kelvin-voigt
    MixedTypeConfig mixed;
    std::string kv_preset{"reference"};  // reference | purely_viscous
    int kv_m{16};
    double kv_dx{0.1};

    int dim() const;
    Weight weight() const;
    Trajectory forcing() const;
    std::optional<PerturbationOp> perturbation() const;

    /// The problem plus whatever the chosen model brings along.
    struct Assembled {
        EvoProblem p;
        std::optional<PerturbationOp> minf;
        std::optional<SubspaceProjector> V;
    };
    Assembled assemble() const;
    Assembled assemble(const Weight& w) const;
};

/// Parses and schema-validates; throws ConfigError with a location hint.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// Headerless comma-separated matrix rows.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace evo
