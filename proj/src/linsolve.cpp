#include "ma/linsolve.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace ma {

LinearSystem assemble(const CoefficientSet& c, double theta, BC bc) {
    if (!(theta > 0)) throw std::invalid_argument("assemble: theta must be positive");
    const Grid2D& g = c.a11.grid;
    const int nx = g.nx, ny = g.ny;
    LinearSystem s;
    s.grid = g;
    s.bc = bc;
    s.theta = theta;
    s.unknown.assign(g.size(), -1);
    const int i_lo = bc == BC::dirichlet ? 1 : 0, i_hi = bc == BC::dirichlet ? nx - 2 : nx - 1;
    for (int i = i_lo; i <= i_hi; ++i)
        for (int j = 1; j <= ny - 2; ++j) {
            s.unknown[std::size_t(i) * ny + j] = int(s.node.size());
            s.node.push_back(i * ny + j);
            s.edge_row.push_back(i == 0 || i == nx - 1);
        }
    const double hx = g.hx(), hy = g.hy();
    std::vector<Eigen::Triplet<double>> T;
    T.reserve(s.node.size() * 13);
    auto put = [&](int row, int i, int j, double w) {
        if (w == 0.0) return;
        const int col = s.unknown[std::size_t(i) * ny + j];
        if (col >= 0) T.emplace_back(row, col, w);
    };
    const double d2[3] = {1, -2, 1}, d1[3] = {-0.5, 0, 0.5};
    for (int r = 0; r < int(s.node.size()); ++r) {
        const int n = s.node[r], i = n / ny, j = n % ny;
        if (s.edge_row[r]) {
            const int sgn = i == 0 ? 1 : -1;
            put(r, i, j, -1.5 / hx);
            put(r, i + sgn, j, 2.0 / hx);
            put(r, i + 2 * sgn, j, -0.5 / hx);
            continue;
        }
        const double a11 = c.a11.v[n], a12 = c.a12.v[n], a22 = c.a22.v[n], a1 = c.a1.v[n], a2 = c.a2.v[n], a0 = c.a.v[n];
        for (int p = -1; p <= 1; ++p)
            for (int q = -1; q <= 1; ++q) {
                double w = 0;
                if (q == 0) w += a11 * d2[p + 1] / (hx * hx) + a1 * d1[p + 1] / hx;
                if (p == 0) w += a22 * d2[q + 1] / (hy * hy) + a2 * d1[q + 1] / hy;
                if (p == 0 && q == 0) w += a0;
                w += 2 * a12 * d1[p + 1] * d1[q + 1] / (hx * hy);
                w -= theta * d2[p + 1] * d2[q + 1] / (hx * hx * hy * hy);
                put(r, i + p, j + q, w);
            }
    }
    s.matrix.resize(int(s.node.size()), int(s.node.size()));
    s.matrix.setFromTriplets(T.begin(), T.end());
    s.matrix.makeCompressed();
    return s;
}

namespace {

Eigen::VectorXd gather_rhs(const LinearSystem& s, const Field& f) {
    Eigen::VectorXd b(s.node.size());
    for (int r = 0; r < int(s.node.size()); ++r) b[r] = s.edge_row[r] ? 0.0 : f.v[s.node[r]];
    return b;
}

Field scatter(const LinearSystem& s, const Eigen::VectorXd& x) {
    Field u(s.grid);
    for (int r = 0; r < int(s.node.size()); ++r) u.v[s.node[r]] = x[r];
    return u;
}

}  // namespace

SolveResult solve(const LinearSystem& sys, const Field& f) {
    if (f.grid != sys.grid) throw std::invalid_argument("solve: right-hand side grid differs from the system grid");
    const Eigen::VectorXd b = gather_rhs(sys, f);
    SolveResult r;
    const double nb = b.norm();
    if (nb == 0) {
        r.u = Field(sys.grid);
        return r;
    }
    Eigen::VectorXd x;
    bool ok = false;
    {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(sys.matrix);
        if (lu.info() == Eigen::Success) {
            x = lu.solve(b);
            ok = lu.info() == Eigen::Success && x.allFinite();
        }
    }
    if (ok) {
        r.rel_residual = (sys.matrix * x - b).norm() / nb;
        ok = r.rel_residual <= 1e-10;
    }
    if (!ok) {
        const Eigen::SparseMatrix<double> At = sys.matrix.transpose();
        const Eigen::SparseMatrix<double> N = At * sys.matrix;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(N);
        if (ldlt.info() != Eigen::Success) throw std::runtime_error("solve: factorization and least-squares fallback failed");
        x = ldlt.solve(At * b);
        if (!x.allFinite()) throw std::runtime_error("solve: least-squares fallback produced non-finite values");
        r.rel_residual = (sys.matrix * x - b).norm() / nb;
        r.fallback = true;
    }
    r.u = scatter(sys, x);
    return r;
}

Field apply_matrix(const LinearSystem& sys, const Field& u) {
    Eigen::VectorXd x(sys.node.size());
    for (int r = 0; r < int(sys.node.size()); ++r) x[r] = u.v[sys.node[r]];
    return scatter(sys, sys.matrix * x);
}

void dump_matrix(const LinearSystem& sys, const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "w"), &std::fclose);
    if (!fp) throw std::runtime_error("cannot write " + path);
    for (int k = 0; k < sys.matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it)
            std::fprintf(fp.get(), "%d %d %.17g\n", int(it.row()), int(it.col()), it.value());
}

TameReport tame_diagnostic(const CoefficientSet& c, double theta, const Field& f, int s, BC bc) {
    if (s < 0 || s > 4) throw std::invalid_argument("tame_diagnostic: s must lie in [0,4]");
    const LinearSystem sys = assemble(c, theta, bc);
    const SolveResult sol = solve(sys, f);
    TameReport t;
    t.s = s;
    t.rel_residual = sol.rel_residual;
    t.fallback = sol.fallback;
    t.lambda = c.lambda_budget;
    t.norm_u = norms(sol.u, s).sobolev.at(s);
    const NormReport nf = norms(f, std::max(s, 2));
    t.norm_f = nf.sobolev.at(s);
    t.norm_f2 = nf.sobolev.at(2);
    const double den = t.norm_f + t.lambda * t.norm_f2;
    t.c_s = den > 0 ? t.norm_u / den : 0;
    return t;
}

}  // namespace ma
