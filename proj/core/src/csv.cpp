#include "evo/csv.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace evo {

void write_trajectory_csv(std::ostream& os, const Trajectory& u) {
    os << "t";
    for (int i = 0; i < u.dim(); ++i) os << ",v" << i;
    os << "\n";
    os << std::setprecision(17);
    for (int k = 0; k <= u.grid().n; ++k) {
        os << u.grid().t(k);
        for (int i = 0; i < u.dim(); ++i) os << "," << u.col(k)(i);
        os << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_trajectory_csv(os, u);
}

Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: empty input");
    int dim = 0;
    {
        std::stringstream header(line);
        std::string cell;
        bool first = true;
        while (std::getline(header, cell, ',')) {
            if (first) {
                if (cell != "t") throw std::runtime_error("trajectory csv: header must start with t");
                first = false;
            } else {
                ++dim;
            }
        }
    }
    if (dim < 1) throw std::runtime_error("trajectory csv: no value columns");

    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        int col = 0;
        while (std::getline(row, cell, ',')) {
            const double x = std::stod(cell);
            if (col == 0)
                times.push_back(x);
            else
                values.push_back(x);
            ++col;
        }
        if (col != dim + 1) throw std::runtime_error("trajectory csv: ragged row");
    }
    if (times.size() < 3) throw std::runtime_error("trajectory csv: need at least 3 rows");

    const int n = static_cast<int>(times.size()) - 1;
    const double h = (times.back() - times.front()) / n;
    for (int k = 0; k <= n; ++k)
        if (std::abs(times[k] - (times.front() + k * h)) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::runtime_error("trajectory csv: non-uniform time column");

    Trajectory u(TimeGrid{times.front(), times.back(), n}, dim);
    for (int k = 0; k <= n; ++k)
        for (int i = 0; i < dim; ++i) u.col(k)(i) = values[k * dim + i];
    return u;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_trajectory_csv(is);
}

}  // namespace evo
