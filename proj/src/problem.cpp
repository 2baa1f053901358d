#include "ma/problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ma {

namespace {

AD2 ad_var(double x, int k) {
    AD1 inner(x, 2, k);
    Eigen::Matrix<AD1, 2, 1> d;
    d(0) = AD1(k == 0 ? 1.0 : 0.0, Eigen::Vector2d::Zero());
    d(1) = AD1(k == 1 ? 1.0 : 0.0, Eigen::Vector2d::Zero());
    return AD2(inner, d);
}

AD2 ad_const(double c) {
    Eigen::Matrix<AD1, 2, 1> d;
    d(0) = AD1(0.0, Eigen::Vector2d::Zero());
    d(1) = AD1(0.0, Eigen::Vector2d::Zero());
    return AD2(AD1(c, Eigen::Vector2d::Zero()), d);
}

double central4(const std::function<double(double)>& g, double h) {
    return (g(-2 * h) - 8 * g(-h) + 8 * g(h) - g(2 * h)) / (12 * h);
}

// Rotation with the eigenvector of the smallest eigenvalue as second column.
void rotation_for(const Eigen::Matrix2d& H, Eigen::Matrix2d& Q, double& lam1, double& lam2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    lam2 = es.eigenvalues()(0);
    lam1 = es.eigenvalues()(1);
    Eigen::Vector2d e2 = es.eigenvectors().col(0);
    if (e2(1) < 0 || (e2(1) == 0 && e2(0) < 0)) e2 = -e2;
    Q << e2(1), e2(0), -e2(0), e2(1);
}

}  // namespace

MetricJet metric_jet(const MetricSpec& m, double u, double v) {
    AD2 U = ad_var(u, 0), V = ad_var(v, 1), E, F, G;
    m.eval(U, V, E, F, G);
    MetricJet j{};
    const AD2* c[3] = {&E, &F, &G};
    for (int q = 0; q < 3; ++q) {
        j.g[q] = c[q]->value().value();
        for (int k = 0; k < 2; ++k) {
            j.dg[q][k] = c[q]->value().derivatives()(k);
            for (int l = 0; l < 2; ++l) j.ddg[q][k][l] = c[q]->derivatives()(k).derivatives()(l);
        }
    }
    return j;
}

double brioschi(const MetricJet& j) {
    const double E = j.g[0], F = j.g[1], G = j.g[2];
    const double Eu = j.dg[0][0], Ev = j.dg[0][1], Fu = j.dg[1][0], Fv = j.dg[1][1], Gu = j.dg[2][0],
                 Gv = j.dg[2][1];
    const double Evv = j.ddg[0][1][1], Fuv = j.ddg[1][0][1], Guu = j.ddg[2][0][0];
    Eigen::Matrix3d M1, M2;
    M1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E, F, 0.5 * Gv, F, G;
    M2 << 0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E, F, 0.5 * Gu, F, G;
    const double W = E * G - F * F;
    return (M1.determinant() - M2.determinant()) / (W * W);
}

Geometry geometry_from_jet(const MetricJet& j) {
    Geometry g;
    g.E = j.g[0];
    g.F = j.g[1];
    g.G = j.g[2];
    const int id[2][2] = {{0, 1}, {1, 2}};
    auto dg = [&](int a, int b, int k) { return j.dg[id[a][b]][k]; };
    Eigen::Matrix2d gm;
    gm << g.E, g.F, g.F, g.G;
    Eigen::Matrix2d gi = gm.inverse();
    const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int k = 0; k < 2; ++k)
        for (int p = 0; p < 3; ++p) {
            const int a = pairs[p][0], b = pairs[p][1];
            double s = 0;
            for (int l = 0; l < 2; ++l) s += gi(k, l) * (dg(l, b, a) + dg(l, a, b) - dg(a, b, l));
            g.gam[k][p] = 0.5 * s;
        }
    g.K = brioschi(j);
    return g;
}

std::function<double(double, double)> builtin_K(const std::string& name, const std::vector<double>& c) {
    auto need = [&](std::size_t n) {
        if (c.size() != n)
            throw std::invalid_argument("K \"" + name + "\" expects " + std::to_string(n) + " coeffs");
    };
    if (name == "quadratic") {
        need(3);
        return [c](double u, double v) { return c[0] * u * u + c[1] * u * v + c[2] * v * v; };
    }
    if (name == "cubic") {
        need(7);
        return [c](double u, double v) {
            return c[0] * u * u + c[1] * u * v + c[2] * v * v + c[3] * u * u * u + c[4] * u * u * v +
                   c[5] * u * v * v + c[6] * v * v * v;
        };
    }
    if (name == "linear") {
        need(2);
        return [c](double u, double v) { return c[0] * u + c[1] * v; };
    }
    if (name == "exact") {
        return [](double u, double v) {
            const double d = 1 + u * u + v * v * v * v * v * v / 9;
            return -v * v / (d * d);
        };
    }
    throw std::invalid_argument("unknown K \"" + name + "\"");
}

MetricSpec builtin_metric(const std::string& name, const std::vector<double>& c) {
    MetricSpec m;
    m.name = name;
    if (name == "flat") {
        m.eval = [](const AD2&, const AD2&, AD2& E, AD2& F, AD2& G) {
            E = ad_const(1);
            F = ad_const(0);
            G = ad_const(1);
        };
    } else if (name == "exp_u") {
        m.eval = [](const AD2& u, const AD2&, AD2& E, AD2& F, AD2& G) {
            E = ad_const(1);
            F = ad_const(0);
            G = exp(2.0 * u);
        };
    } else if (name == "saddle") {
        const double k = c.empty() ? 1.0 : c[0];
        m.eval = [k](const AD2& u, const AD2& v, AD2& E, AD2& F, AD2& G) {
            AD2 g = 1.0 - k * u * u * u * u / 12.0 + 0.5 * k * u * u * v * v;
            E = ad_const(1);
            F = ad_const(0);
            G = g * g;
        };
    } else if (name == "graph") {
        m.eval = [](const AD2& u, const AD2& v, AD2& E, AD2& F, AD2& G) {
            AD2 zu = u, zv = -v * v * v / 3.0;
            E = 1.0 + zu * zu;
            F = zu * zv;
            G = 1.0 + zv * zv;
        };
    } else if (name == "graph_warped") {
        std::vector<double> b = c.empty() ? std::vector<double>{1.2, 0.3, -0.1, 0.9, 0.4, -0.5} : c;
        if (b.size() != 6) throw std::invalid_argument("metric graph_warped expects 6 coeffs");
        m.eval = [b](const AD2& u, const AD2& v, AD2& E, AD2& F, AD2& G) {
            AD2 s = b[0] * u + b[1] * v + b[4] * u * u;
            AD2 t = b[2] * u + b[3] * v + b[5] * u * v;
            AD2 su = b[0] + 2.0 * b[4] * u, sv = ad_const(b[1]);
            AD2 tu = b[2] + b[5] * v, tv = b[3] + b[5] * u;
            AD2 zs = s, zt = -t * t * t / 3.0;
            AD2 g11 = 1.0 + zs * zs, g12 = zs * zt, g22 = 1.0 + zt * zt;
            E = su * su * g11 + 2.0 * su * tu * g12 + tu * tu * g22;
            F = su * sv * g11 + (su * tv + sv * tu) * g12 + tu * tv * g22;
            G = sv * sv * g11 + 2.0 * sv * tv * g12 + tv * tv * g22;
        };
    } else {
        throw std::invalid_argument("unknown metric \"" + name + "\"");
    }
    return m;
}

Eigen::Matrix2d hessian_at_origin(const std::function<double(double, double)>& F, double h) {
    auto fuu = [&](double s) { return (-F(2 * s, 0) + 16 * F(s, 0) - 30 * F(0, 0) + 16 * F(-s, 0) - F(-2 * s, 0)) / (12 * s * s); };
    auto fvv = [&](double s) { return (-F(0, 2 * s) + 16 * F(0, s) - 30 * F(0, 0) + 16 * F(0, -s) - F(0, -2 * s)) / (12 * s * s); };
    auto fuv2 = [&](double s) { return (F(s, s) - F(s, -s) - F(-s, s) + F(-s, -s)) / (4 * s * s); };
    Eigen::Matrix2d H;
    H(0, 0) = fuu(h);
    H(1, 1) = fvv(h);
    H(0, 1) = H(1, 0) = (4 * fuv2(h) - fuv2(2 * h)) / 3;
    return H;
}

Diagnosis check_hypotheses(const std::function<double(double, double)>& K, double tol) {
    Diagnosis d;
    d.K0 = K(0, 0);
    const double h = 1e-3;
    d.grad[0] = central4([&](double s) { return K(s, 0); }, h);
    d.grad[1] = central4([&](double s) { return K(0, s); }, h);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hessian_at_origin(K));
    d.eig[0] = es.eigenvalues()(1);
    d.eig[1] = es.eigenvalues()(0);
    std::ostringstream os;
    if (std::abs(d.K0) > tol) {
        os << "K(0) = " << d.K0 << " is not zero";
    } else if (std::hypot(d.grad[0], d.grad[1]) > tol) {
        os << "grad K(0) = (" << d.grad[0] << ", " << d.grad[1] << ") is not zero";
    } else if (!(d.eig[1] < -tol)) {
        os << "Hess K(0) has no negative eigenvalue (eigenvalues " << d.eig[0] << ", " << d.eig[1] << ")";
    } else {
        d.accepted = true;
    }
    d.reason = os.str();
    return d;
}

Normalization normalize(const std::function<double(double, double)>& K, const std::function<double(double, double)>& f0) {
    auto Kf = [&](double u, double v) { return K(u, v) * f0(u, v); };
    Eigen::Matrix2d Q;
    double l1, l2;
    rotation_for(hessian_at_origin(Kf), Q, l1, l2);
    if (!(l2 < -1e-10)) throw std::invalid_argument("normalize: degenerate Hessian, no negative eigenvalue");
    const double alpha = std::abs(l1) > 1e-6 ? std::sqrt(2 / std::abs(l1)) : 1.0;
    const double beta = std::sqrt(2 / std::abs(l2));
    Normalization n;
    n.A = Q * Eigen::DiagonalMatrix<double, 2>(alpha, beta);
    n.zscale = std::abs(n.A.determinant());
    return n;
}

double smoothstep(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return t * t * t * (t * (6 * t - 15) + 10);
}

double cutoff1d(double t, double a, double b) { return 1 - smoothstep((std::abs(t) - a) / (b - a)); }

std::array<double, 3> ProblemSpec::a(double u, double v, double, double q1, double q2) const {
    if (mode == Mode::curvature) return {0, 0, 0};
    Geometry g = geom(u, v);
    return {-(g.gam[0][0] * q1 + g.gam[1][0] * q2), -(g.gam[0][1] * q1 + g.gam[1][1] * q2),
            -(g.gam[0][2] * q1 + g.gam[1][2] * q2)};
}

double ProblemSpec::f(double u, double v, double, double q1, double q2) const {
    if (mode == Mode::curvature) {
        const double s = 1 + M(0, 0) * q1 * q1 + 2 * M(0, 1) * q1 * q2 + M(1, 1) * q2 * q2;
        return s * s;
    }
    Geometry g = geom(u, v);
    return g.E * g.G - g.F * g.F - g.E * q2 * q2 - g.G * q1 * q1 + 2 * g.F * q1 * q2;
}

void validate(const ProblemSpec& p) {
    if (!(p.epsilon > 0 && p.epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5)");
    if (!(p.x0 > 0 && p.y0 > 0)) throw std::invalid_argument("x0 and y0 must be positive");
    if (!(p.psi_inner > 0 && p.psi_inner < p.psi_outer && p.psi_outer <= 1))
        throw std::invalid_argument("psi fractions must satisfy 0 < inner < outer <= 1");
    if (!p.K) throw std::invalid_argument("K is not set");
    if (p.mode == Mode::embedding && !p.geom) throw std::invalid_argument("embedding mode needs a metric");
}

ProblemSpec curvature_problem(const std::function<double(double, double)>& K, double epsilon, bool do_normalize) {
    ProblemSpec p;
    p.mode = Mode::curvature;
    p.epsilon = epsilon;
    if (do_normalize) {
        Diagnosis d = check_hypotheses(K);
        if (!d.accepted) throw std::invalid_argument("hypotheses rejected: " + d.reason);
        p.norm = normalize(K, [](double, double) { return 1.0; });
    }
    const Eigen::Matrix2d A = p.norm.A;
    const double c = p.norm.zscale;
    const Eigen::Matrix2d Ai = A.inverse();
    p.M = c * c * Ai * Ai.transpose();
    p.K = [K, A](double u, double v) {
        Eigen::Vector2d o = A * Eigen::Vector2d(u, v);
        return K(o(0), o(1));
    };
    validate(p);
    return p;
}

ProblemSpec metric_to_problem(const MetricSpec& m, double epsilon) {
    MetricJet j0 = metric_jet(m, 0, 0);
    Eigen::Matrix2d g0;
    g0 << j0.g[0], j0.g[1], j0.g[1], j0.g[2];
    if (!(g0(0, 0) > 0 && g0.determinant() > 0)) throw std::invalid_argument("metric is not positive definite at the origin");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g0);
    const Eigen::Matrix2d P = es.operatorInverseSqrt();

    auto K0 = [m](double u, double v) { return brioschi(metric_jet(m, u, v)); };
    auto K1 = [K0, P](double u, double v) {
        Eigen::Vector2d o = P * Eigen::Vector2d(u, v);
        return K0(o(0), o(1));
    };
    Diagnosis d = check_hypotheses(K1);
    if (!d.accepted) throw std::invalid_argument("hypotheses rejected: " + d.reason);
    Eigen::Matrix2d Q;
    double l1, l2;
    rotation_for(hessian_at_origin(K1), Q, l1, l2);
    const double s = std::pow(2 / std::abs(l2), 0.25);
    const Eigen::Matrix2d A = s * P * Q;
    const Eigen::Matrix2d B = P * Q;

    // pulled back by the linear map and rescaled by 1/s^2
    MetricSpec lin;
    lin.name = m.name + ":linear";
    lin.eval = [m, A, B](const AD2& u, const AD2& v, AD2& E, AD2& F, AD2& G) {
        AD2 uo = A(0, 0) * u + A(0, 1) * v, vo = A(1, 0) * u + A(1, 1) * v, e, f, g;
        m.eval(uo, vo, e, f, g);
        E = B(0, 0) * B(0, 0) * e + 2.0 * B(0, 0) * B(1, 0) * f + B(1, 0) * B(1, 0) * g;
        F = B(0, 0) * B(0, 1) * e + (B(0, 0) * B(1, 1) + B(1, 0) * B(0, 1)) * f + B(1, 0) * B(1, 1) * g;
        G = B(0, 1) * B(0, 1) * e + 2.0 * B(0, 1) * B(1, 1) * f + B(1, 1) * B(1, 1) * g;
    };
    Geometry gl = geometry_from_jet(metric_jet(lin, 0, 0));

    ProblemSpec p;
    p.mode = Mode::embedding;
    p.epsilon = epsilon;
    p.norm.A = A;
    p.norm.metric_scale = 1 / (s * s);
    p.norm.zscale = s;
    for (int k = 0; k < 2; ++k)
        for (int q = 0; q < 3; ++q) p.norm.gamma0[k][q] = gl.gam[k][q];

    // quadratic change old^k = new^k - gam^k_ij new^i new^j / 2
    double G0[2][2][2];
    for (int k = 0; k < 2; ++k) {
        G0[k][0][0] = gl.gam[k][0];
        G0[k][0][1] = G0[k][1][0] = gl.gam[k][1];
        G0[k][1][1] = gl.gam[k][2];
    }
    MetricSpec fin;
    fin.name = m.name + ":normalized";
    fin.eval = [lin, G0](const AD2& u, const AD2& v, AD2& E, AD2& F, AD2& G) {
        const AD2* x[2] = {&u, &v};
        AD2 o[2], J[2][2];
        for (int k = 0; k < 2; ++k) {
            o[k] = *x[k];
            for (int a = 0; a < 2; ++a) {
                J[k][a] = ad_const(k == a ? 1.0 : 0.0);
                for (int b = 0; b < 2; ++b) {
                    o[k] = o[k] - 0.5 * G0[k][a][b] * (*x[a]) * (*x[b]);
                    J[k][a] = J[k][a] - G0[k][a][b] * (*x[b]);
                }
            }
        }
        AD2 e, f, g;
        lin.eval(o[0], o[1], e, f, g);
        E = J[0][0] * J[0][0] * e + 2.0 * J[0][0] * J[1][0] * f + J[1][0] * J[1][0] * g;
        F = J[0][0] * J[0][1] * e + (J[0][0] * J[1][1] + J[1][0] * J[0][1]) * f + J[1][0] * J[1][1] * g;
        G = J[0][1] * J[0][1] * e + 2.0 * J[0][1] * J[1][1] * f + J[1][1] * J[1][1] * g;
    };
    p.metric = fin;
    p.geom = [fin](double u, double v) { return geometry_from_jet(metric_jet(fin, u, v)); };
    p.K = [fin](double u, double v) { return brioschi(metric_jet(fin, u, v)); };
    p.label = m.name;
    validate(p);
    return p;
}

CoefficientSet zero_coeffs(const Grid2D& g) {
    CoefficientSet c;
    c.a11 = c.a12 = c.a22 = c.a1 = c.a2 = c.a = Field(g);
    return c;
}

Field apply_operator(const CoefficientSet& c, const Field& u) {
    Field r = mul(c.a11, diff(u, 2, 0));
    r += 2.0 * mul(c.a12, diff(u, 1, 1));
    r += mul(c.a22, diff(u, 0, 2));
    r += mul(c.a1, diff(u, 1, 0));
    r += mul(c.a2, diff(u, 0, 1));
    r += mul(c.a, u);
    return r;
}

ScaledOperator::ScaledOperator(ProblemSpec spec, const Grid2D& grid) : spec_(std::move(spec)), grid_(grid) {
    validate(spec_);
    const auto& s = spec_;
    psi_ = Field::sample(grid_, [&](double x, double y) {
        return cutoff1d(x / s.x0, s.psi_inner, s.psi_outer) * cutoff1d(y / s.y0, s.psi_inner, s.psi_outer);
    });
    const double e = s.epsilon;
    const double e2 = e * e, e4 = e2 * e2;
    K_.resize(grid_.size());
    if (s.mode == Mode::embedding) geo_.resize(grid_.size());
    for (int i = 0; i < grid_.nx; ++i)
        for (int j = 0; j < grid_.ny; ++j) {
            const std::size_t n = std::size_t(i) * grid_.ny + j;
            const double u = e4 * grid_.x(i), v = e2 * grid_.y(j);
            if (s.mode == Mode::embedding) {
                geo_[n] = s.geom(u, v);
                K_[n] = geo_[n].K;
            } else {
                K_[n] = s.K(u, v);
            }
        }
}

double ScaledOperator::remainder_at(int node, double x, double y, const double s[6]) const {
    const double e = spec_.epsilon;
    const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2, e5 = e4 * e, e7 = e5 * e2;
    const double u = e4 * x, v = e2 * y;
    const double zu = u + e5 * s[1];
    const double zv = -v * v * v / 3 + e7 * s[2];
    const double zuu = 1 + e * s[3];
    const double zuv = e3 * s[4];
    const double zvv = -v * v + e5 * s[5];
    double a11 = 0, a12 = 0, a22 = 0, f;
    if (spec_.mode == Mode::embedding) {
        const Geometry& g = geo_[node];
        a11 = -(g.gam[0][0] * zu + g.gam[1][0] * zv);
        a12 = -(g.gam[0][1] * zu + g.gam[1][1] * zv);
        a22 = -(g.gam[0][2] * zu + g.gam[1][2] * zv);
        f = g.E * g.G - g.F * g.F - g.E * zv * zv - g.G * zu * zu + 2 * g.F * zu * zv;
    } else {
        const auto& M = spec_.M;
        const double q = 1 + M(0, 0) * zu * zu + 2 * M(0, 1) * zu * zv + M(1, 1) * zv * zv;
        f = q * q;
    }
    if (!(f > 0)) throw std::domain_error("f is not positive on the mapped box; epsilon too large");
    const double det = (zuu + a11) * (zvv + a22) - (zuv + a12) * (zuv + a12);
    const double res = det - K_[node] * f;
    return res / e5 - (-y * y * s[3] + s[5]);
}

void ScaledOperator::derivs(const Field& w, Field d[6]) const {
    if (w.grid != grid_) throw std::invalid_argument("phi_apply: w is not on the operator grid");
    d[0] = w;
    d[1] = diff(w, 1, 0);
    d[2] = diff(w, 0, 1);
    d[3] = diff(w, 2, 0);
    d[4] = diff(w, 1, 1);
    d[5] = diff(w, 0, 2);
}

Field ScaledOperator::phi_apply(const Field& w) const {
    Field d[6];
    derivs(w, d);
    Field r(grid_);
    for (int i = 0; i < grid_.nx; ++i)
        for (int j = 0; j < grid_.ny; ++j) {
            const int n = i * grid_.ny + j;
            const double x = grid_.x(i), y = grid_.y(j);
            double val = -y * y * d[3].v[n] + d[5].v[n];
            const double ps = psi_.v[n];
            if (spec_.remainder && ps != 0) {
                double s[6];
                for (int k = 0; k < 6; ++k) s[k] = d[k].v[n];
                val += ps * remainder_at(n, x, y, s);
            }
            r.v[n] = val;
        }
    return r;
}

CoefficientSet ScaledOperator::linearize(const Field& w) const {
    Field d[6];
    derivs(w, d);
    const double hg = 1e-5 * (1 + sup_abs(w));
    Field c[6];
    for (auto& f : c) f = Field(grid_);
    for (int i = 0; i < grid_.nx; ++i)
        for (int j = 0; j < grid_.ny; ++j) {
            const int n = i * grid_.ny + j;
            const double ps = psi_.v[n];
            if (!spec_.remainder || ps == 0) continue;
            double s[6];
            for (int k = 0; k < 6; ++k) s[k] = d[k].v[n];
            for (int k = 0; k < 6; ++k) {
                const double keep = s[k];
                s[k] = keep + hg;
                const double rp = remainder_at(n, grid_.x(i), grid_.y(j), s);
                s[k] = keep - hg;
                const double rm = remainder_at(n, grid_.x(i), grid_.y(j), s);
                s[k] = keep;
                const double g = ps * (rp - rm) / (2 * hg);
                if (!std::isfinite(g)) throw std::domain_error("linearize: non-finite Gateaux difference");
                c[k].v[n] = g;
            }
        }
    CoefficientSet cs;
    Field y2 = Field::sample(grid_, [](double, double y) { return -y * y; });
    cs.a11 = y2 + c[3];
    cs.a12 = 0.5 * c[4];
    cs.a22 = Field(grid_, 1.0) + c[5];
    cs.a1 = c[1];
    cs.a2 = c[2];
    cs.a = c[0];
    double lam = 0;
    for (int k = 0; k < 6; ++k) lam += norms(c[k], 2).holder[2];
    cs.lambda_budget = lam / spec_.epsilon;
    return cs;
}

}  // namespace ma
