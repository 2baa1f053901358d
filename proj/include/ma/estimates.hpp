#pragma once

#include <cstdint>
#include <vector>

#include "ma/grid.hpp"
#include "ma/linsolve.hpp"
#include "ma/strip.hpp"

namespace ma {

struct EnergyRow {
    double theta = 0;
    int probe = 0;
    EnergyCheck check;
};

/// Energy checks of random probes supported in |y| < y_lim on the model strip over X.
std::vector<EnergyRow> energy_suite(const Grid2D& X, const StripParams& p, const std::vector<double>& thetas, int probes,
                                    std::uint64_t seed, double y_lim = 1.2);

/// C2 for one theta: the largest probe ratio.
double energy_constant(const std::vector<EnergyRow>& rows, double theta);

/// Tame diagnostic of the model strip over X for a fixed bump right-hand side.
TameReport model_tame(const Grid2D& X, const StripParams& p, double theta, int s, BC bc = BC::dirichlet);

}  // namespace ma
