#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ma/grid.hpp"
#include "ma/linsolve.hpp"
#include "ma/nashmoser.hpp"
#include "ma/problem.hpp"
#include "ma/strip.hpp"

namespace ma {

/// Everything a run needs, read from flat key = value text.
struct RunConfig {
    std::string mode = "curvature";  // curvature | embedding
    std::string label;
    std::string K = "quadratic";
    std::vector<double> K_coeffs = {1, 0, -1};
    std::string metric = "graph_warped";
    std::vector<double> metric_coeffs;
    bool normalize = true;
    bool remainder = true;
    double epsilon = 0.05;
    int nx = 65, ny = 65;
    double x0 = 1, y0 = 1;
    Schedule schedule;
    StripParams strip;
    BC bc = BC::dirichlet;
    std::uint64_t seed = 1;
    bool dump_matrix = false;
    std::string out_dir = "out";
};

/// Parse key = value lines; '#' starts a comment. Unknown keys and bad values throw naming the key.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& c);
void validate(const RunConfig& c);

Grid2D config_grid(const RunConfig& c);
ProblemSpec build_problem(const RunConfig& c);

}  // namespace ma
