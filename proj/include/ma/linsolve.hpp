#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ma/grid.hpp"
#include "ma/problem.hpp"

namespace ma {

enum class BC { dirichlet, neumann_x };

/// L' - theta d_xxyy on the strip grid, rows indexed by unknown nodes.
struct LinearSystem {
    Eigen::SparseMatrix<double> matrix;
    Grid2D grid;
    BC bc = BC::dirichlet;
    double theta = 0;
    std::vector<int> unknown;  // node -> unknown index or -1
    std::vector<int> node;     // unknown index -> node
    std::vector<bool> edge_row;  // unknown index -> Neumann closure row
};

LinearSystem assemble(const CoefficientSet& c, double theta, BC bc);

struct SolveResult {
    Field u;
    double rel_residual = 0;
    bool fallback = false;
};

SolveResult solve(const LinearSystem& sys, const Field& f);

/// Matrix times the unknown values of u, scattered back to the grid.
Field apply_matrix(const LinearSystem& sys, const Field& u);

/// Coordinate text dump, one "row col value" triple per line.
void dump_matrix(const LinearSystem& sys, const std::string& path);

struct TameReport {
    int s = 2;
    double norm_u = 0, norm_f = 0, norm_f2 = 0, lambda = 0;
    double c_s = 0;
    double rel_residual = 0;
    bool fallback = false;
};

TameReport tame_diagnostic(const CoefficientSet& c, double theta, const Field& f, int s, BC bc = BC::dirichlet);

}  // namespace ma
