#pragma once

#include <array>
#include <vector>

#include "ma/grid.hpp"

namespace ma {

/// Radial spectral profile: 1 for r <= 1, 0 for r >= 2, quintic blend between.
double hat_profile(double r);

/// Mirror reflection across each edge, tapered to zero over the outer half of the margin.
Field extend(const Field& f, double margin);

/// Spectral low-pass with multiplier hat_profile(|k| / gamma), k in cycles per unit,
/// on the even-periodic extension of the rectangle.
Field mollify(const Field& f, double gamma);

struct SmoothingReport {
    std::vector<double> gammas;
    // c[a][b][k]: max over probes of |S f|_b / |f|_a / gamma^max(b-a,0) at gammas[k]
    std::array<std::array<std::vector<double>, 3>, 3> c;
    std::array<std::array<double, 3>, 3> spread{};  // max/min of c[a][b] over gammas
    std::vector<double> rate;                        // max over probes of |f - S f|_0 / |f|_2
    double rate_slope = 0;                           // log-log slope of rate against gamma
    bool pass = false;
};

SmoothingReport smoothing_constants(const std::vector<double>& gammas, const std::vector<Field>& probes);

/// Probe fields used by the smoothing diagnostics on g.
std::vector<Field> smoothing_probes(const Grid2D& g);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ma
