#include "ma/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ma {

std::vector<EnergyRow> energy_suite(const Grid2D& X, const StripParams& p, const std::vector<double>& thetas, int probes,
                                    std::uint64_t seed, double y_lim) {
    std::vector<EnergyRow> rows;
    for (double th : thetas) {
        StripParams q = p;
        q.theta = th;
        StripLayout L;
        const CoefficientSet strip = extend_to_strip(model_coeffs(X), q, &L);
        const MultiplierSet m = build_multipliers(strip, q, th);
        std::mt19937_64 rng(seed);
        for (int k = 0; k < probes; ++k) {
            const Field u = random_probe(L.grid, y_lim, rng);
            rows.push_back({th, k, check_energy_inequality(strip, m, th, u)});
        }
    }
    return rows;
}

double energy_constant(const std::vector<EnergyRow>& rows, double theta) {
    double c = 0;
    for (const EnergyRow& r : rows)
        if (r.theta == theta) c = std::max(c, r.check.c2);
    return c;
}

TameReport model_tame(const Grid2D& X, const StripParams& p, double theta, int s, BC bc) {
    StripParams q = p;
    q.theta = theta;
    StripLayout L;
    const CoefficientSet strip = extend_to_strip(model_coeffs(X), q, &L);
    const double r0 = 0.6 * std::min(X.x_max, X.y_max);
    const Field f = Field::sample(L.grid, [r0](double x, double y) {
        const double r = (x * x + y * y) / (r0 * r0);
        return r < 1 ? std::pow(1 - r, 4) : 0.0;
    });
    return tame_diagnostic(strip, theta, f, s, bc);
}

}  // namespace ma
