#include "evo/config.hpp"

#include "evo/csv.hpp"
#include "evo/mixed_type.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace evo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config error at " + where + ": " + what);
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) fail(where, "expected array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols) fail(where, "ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

/// Piecewise-linear interpolation of a tabulated family; derivative by the
/// family's own finite differences, table nodes declared as breakpoints.
OperatorFamily table_family(const std::string& csv_path, const std::string& where) {
    std::ifstream is(csv_path);
    if (!is) fail(where, "cannot open table csv " + csv_path);
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> mats;
    std::string line;
    int dim = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        const int entries = static_cast<int>(vals.size()) - 1;
        const int d = static_cast<int>(std::lround(std::sqrt(double(entries))));
        if (d * d != entries) fail(where, "table row is not t plus a square matrix");
        if (dim == 0) dim = d;
        if (d != dim) fail(where, "table dimension changes between rows");
        times.push_back(vals[0]);
        Eigen::MatrixXd m(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m(r, c) = vals[1 + r * dim + c];
        mats.push_back(std::move(m));
    }
    if (times.size() < 2) fail(where, "table needs at least 2 rows");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) fail(where, "table times must increase");

    OperatorFamily fam;
    fam.dim = dim;
    fam.breakpoints = times;
    fam.sampler = [times, mats](double t) -> Eigen::MatrixXd {
        if (t <= times.front()) return mats.front();
        if (t >= times.back()) return mats.back();
        size_t i = 1;
        while (times[i] < t) ++i;
        const double s = (t - times[i - 1]) / (times[i] - times[i - 1]);
        return (1.0 - s) * mats[i - 1] + s * mats[i];
    };
    return fam;
}

OperatorFamily parse_family(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) fail(where, "family needs a type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        return OperatorFamily::constant(parse_matrix(j.at("matrix"), where + ".matrix"));
    }
    if (type == "piecewise") {
        std::vector<double> bps = j.at("breakpoints").get<std::vector<double>>();
        const json& jm = j.at("matrices");
        if (jm.size() != bps.size() + 1)
            fail(where, "piecewise needs breakpoints.size()+1 matrices");
        std::vector<Eigen::MatrixXd> mats;
        for (size_t i = 0; i < jm.size(); ++i)
            mats.push_back(parse_matrix(jm[i], where + ".matrices"));
        for (size_t i = 1; i < bps.size(); ++i)
            if (!(bps[i] > bps[i - 1])) fail(where, "breakpoints must increase");
        OperatorFamily fam;
        fam.dim = static_cast<int>(mats[0].rows());
        fam.breakpoints = bps;
        fam.piecewise_constant = true;
        fam.sampler = [bps, mats](double t) {
            size_t i = 0;
            while (i < bps.size() && t >= bps[i]) ++i;
            return mats[i];
        };
        fam.derivative_sampler = [d = fam.dim](double) { return Eigen::MatrixXd::Zero(d, d); };
        return fam;
    }
    if (type == "ramp") {
        const Eigen::MatrixXd scale = parse_matrix(j.at("scale"), where + ".scale");
        Eigen::MatrixXd offset = Eigen::MatrixXd::Zero(scale.rows(), scale.cols());
        if (j.contains("offset")) offset = parse_matrix(j.at("offset"), where + ".offset");
        return OperatorFamily::scalar_pencil(phi, phi_derivative, scale, offset, {0.0, 1.0});
    }
    if (type == "table") {
        return table_family(j.at("csv").get<std::string>(), where);
    }
    fail(where, "unknown family type " + type);
}

SkewOperator parse_spatial(const json& j, int dim, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) fail(where, "spatial operator needs a type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") return SkewOperator::zero(dim);
    if (type == "block_skew_1d") {
        const int m = j.at("m").get<int>();
        const double dx = j.at("dx").get<double>();
        if (2 * m != dim) fail(where, "block_skew_1d needs dim = 2m");
        return make_block_skew(grad_1d_dirichlet(m, dx));
    }
    if (type == "matrix") {
        return SkewOperator(read_matrix_csv(j.at("csv").get<std::string>()));
    }
    fail(where, "unknown spatial operator type " + type);
}

}  // namespace

Weight RunConfig::weight() const { return Weight{rho_values.front()}; }

int RunConfig::dim() const {
    if (example_type == "mixed-type") return 2 * mixed.m;
    if (example_type == "kelvin-voigt") return 2 * kv_m;
    return M0.dim;
}

Trajectory RunConfig::forcing() const {
    const int d = dim();
    if (forcing_type == "zero") return Trajectory::zero(grid, d);
    if (forcing_type == "step") {
        Trajectory f(grid, d);
        for (int k = 0; k <= grid.n; ++k)
            f.col(k) = (grid.t(k) >= 0.0) ? Eigen::VectorXd::Ones(d).eval()
                                          : Eigen::VectorXd::Zero(d).eval();
        return f;
    }
    if (forcing_type == "csv") {
        Trajectory f = read_trajectory_csv(forcing_csv);
        if (f.dim() != d) throw ConfigError("config error at forcing: csv dim mismatch");
        if (f.grid().n != grid.n || f.grid().t_min != grid.t_min || f.grid().t_max != grid.t_max)
            throw ConfigError("config error at forcing: csv grid mismatch");
        return f;
    }
    throw ConfigError("config error at forcing: unknown type " + forcing_type);
}

RunConfig::Assembled RunConfig::assemble() const { return assemble(weight()); }

RunConfig::Assembled RunConfig::assemble(const Weight& w) const {
    if (example_type == "mixed-type") {
        EvoProblem p = build_mixed_type(mixed, w, grid, forcing());
        return {std::move(p), perturbation(), std::nullopt};
    }
    if (example_type == "kelvin-voigt") {
        const KelvinVoigtConfig kv = kv_preset == "purely_viscous"
                                         ? KelvinVoigtConfig::purely_viscous(kv_m, kv_dx)
                                         : KelvinVoigtConfig::reference(kv_m, kv_dx);
        KelvinVoigtSystem sys = build_kv_problem(kv, w, grid, forcing());
        return {std::move(sys.p), std::move(sys.minf), std::move(sys.V)};
    }
    return {EvoProblem{M0, M1, A, forcing(), w, std::nullopt}, perturbation(), std::nullopt};
}

std::optional<PerturbationOp> RunConfig::perturbation() const {
    if (perturbation_type == "none") return std::nullopt;
    if (perturbation_type == "delay") return delay_operator(delay_tau);
    if (perturbation_type == "convolution")
        return convolution_operator(read_trajectory_csv(kernel_csv));
    throw ConfigError("config error at perturbation: unknown type " + perturbation_type);
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        RunConfig cfg;
        if (!j.contains("schema_version")) fail("schema_version", "missing");
        cfg.schema_version = j.at("schema_version").get<int>();
        if (cfg.schema_version != 1) fail("schema_version", "unsupported version");

        if (j.contains("example")) {
            const json& je = j.at("example");
            cfg.example_type = je.at("type").get<std::string>();
            if (cfg.example_type == "mixed-type") {
                if (je.contains("m")) cfg.mixed.m = je.at("m").get<int>();
                if (je.contains("epsilon")) cfg.mixed.epsilon = je.at("epsilon").get<double>();
                if (je.contains("L")) cfg.mixed.L = je.at("L").get<double>();
                if (je.contains("nonautonomous"))
                    cfg.mixed.nonautonomous = je.at("nonautonomous").get<bool>();
                cfg.mixed.validate();
            } else if (cfg.example_type == "kelvin-voigt") {
                if (je.contains("m")) cfg.kv_m = je.at("m").get<int>();
                if (je.contains("dx")) cfg.kv_dx = je.at("dx").get<double>();
                if (je.contains("preset")) cfg.kv_preset = je.at("preset").get<std::string>();
                if (cfg.kv_preset != "reference" && cfg.kv_preset != "purely_viscous")
                    fail("example.preset", "unknown preset " + cfg.kv_preset);
            } else {
                fail("example.type", "unknown example " + cfg.example_type);
            }
        }
        if (cfg.example_type == "none") {
            const json& jp = j.at("problem");
            cfg.M0 = parse_family(jp.at("M0"), "problem.M0");
            cfg.M1 = parse_family(jp.at("M1"), "problem.M1");
            if (cfg.M0.dim != cfg.M1.dim) fail("problem", "M0/M1 dimensions disagree");
            cfg.A = jp.contains("A") ? parse_spatial(jp.at("A"), cfg.M0.dim, "problem.A")
                                     : SkewOperator::zero(cfg.M0.dim);
        }

        if (j.contains("problem") && j.at("problem").contains("forcing")) {
            const json& jf = j.at("problem").at("forcing");
            cfg.forcing_type = jf.at("type").get<std::string>();
            if (cfg.forcing_type == "csv") cfg.forcing_csv = jf.at("path").get<std::string>();
        } else if (j.contains("forcing")) {
            const json& jf = j.at("forcing");
            cfg.forcing_type = jf.at("type").get<std::string>();
            if (cfg.forcing_type == "csv") cfg.forcing_csv = jf.at("path").get<std::string>();
        }

        const json& jg = j.at("grid");
        cfg.grid = TimeGrid{jg.at("t_min").get<double>(), jg.at("t_max").get<double>(),
                            jg.at("n").get<int>()};

        const json& jw = j.at("weight");
        if (jw.contains("rho"))
            cfg.rho_values = {jw.at("rho").get<double>()};
        else if (jw.contains("sweep"))
            cfg.rho_values = jw.at("sweep").get<std::vector<double>>();
        else
            fail("weight", "needs rho or sweep");
        for (double rho : cfg.rho_values)
            if (!(rho > 0.0)) fail("weight", "rho must be positive");
        if (cfg.rho_values.empty()) fail("weight", "empty sweep");

        if (j.contains("perturbation")) {
            const json& jq = j.at("perturbation");
            cfg.perturbation_type = jq.at("type").get<std::string>();
            if (cfg.perturbation_type == "delay") cfg.delay_tau = jq.at("tau").get<double>();
            if (cfg.perturbation_type == "convolution")
                cfg.kernel_csv = jq.at("kernel_csv").get<std::string>();
        }
        if (j.contains("verification"))
            cfg.verifications = j.at("verification").get<std::vector<std::string>>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned long long>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

        // Referenced files must exist at parse time.
        for (const std::string& path : {cfg.forcing_csv, cfg.kernel_csv}) {
            if (path.empty()) continue;
            std::ifstream probe(path);
            if (!probe) fail("file reference", "missing file " + path);
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open matrix csv " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (!rows.empty() && vals.size() != rows[0].size())
            throw ConfigError("matrix csv: ragged rows in " + path);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ConfigError("matrix csv: empty file " + path);
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

}  // namespace evo
