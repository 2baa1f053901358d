#include "ma/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "ma/estimates.hpp"
#include "ma/smoothing.hpp"

namespace ma {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json stats(const Stats& s) { return json{{"sup", s.sup}, {"l2", s.l2}}; }

json grid_json(const Grid2D& g) {
    return json{{"nx", g.nx}, {"ny", g.ny}, {"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min}, {"y_max", g.y_max}};
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream o(p);
    if (!o) throw std::runtime_error("cannot write " + p.string());
    o << s;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return json::parse(in);
}

/// Options shared by every subcommand.
struct Flags {
    std::string config, out;
    std::vector<int> grid;
    double epsilon = 0, mu = 0, tau = 0, theta0 = 0, tol = 0;
    int n0 = 0, max_iter = 0;
    std::uint64_t seed = 0;
    std::map<std::string, CLI::Option*> opt;

    void attach(CLI::App* app) {
        opt["config"] = app->add_option("--config", config, "configuration file (key = value)");
        opt["out"] = app->add_option("--out", out, "output directory");
        opt["grid"] = app->add_option("--grid", grid, "grid nodes NX NY")->expected(2);
        opt["epsilon"] = app->add_option("--epsilon", epsilon, "scaling parameter");
        opt["mu"] = app->add_option("--mu", mu, "smoothing base");
        opt["tau"] = app->add_option("--tau", tau, "smoothing exponent growth");
        opt["n0"] = app->add_option("--n0", n0, "schedule offset");
        opt["theta0"] = app->add_option("--theta0", theta0, "initial regularization");
        opt["max-iter"] = app->add_option("--max-iter", max_iter, "maximum number of linear solves");
        opt["tol"] = app->add_option("--tol", tol, "residual tolerance");
        opt["seed"] = app->add_option("--seed", seed, "seed of the random probes");
    }
    bool has(const std::string& k) const { return opt.at(k)->count() > 0; }

    RunConfig resolve(RunConfig c) const {
        if (has("config")) c = load_config(config, c);
        if (has("out")) c.out_dir = out;
        if (has("grid")) {
            c.nx = grid[0];
            c.ny = grid[1];
        }
        if (has("epsilon")) c.epsilon = epsilon;
        if (has("mu")) c.schedule.mu = mu;
        if (has("tau")) c.schedule.tau = tau;
        if (has("n0")) c.schedule.n0 = n0;
        if (has("theta0")) c.schedule.theta0 = theta0;
        if (has("max-iter")) c.schedule.max_iter = max_iter;
        if (has("tol")) c.schedule.tol = tol;
        if (has("seed")) c.seed = seed;
        validate(c);
        return c;
    }
};

void dump_final_matrix(const RunResult& r, const ScaledOperator& op, const RunConfig& c, const fs::path& path) {
    const CoefficientSet coef = op.linearize(r.w);
    const DiffeoMap map = build_characteristics(coef);
    const PushResult push = pushforward(coef, map);
    StripParams sp = c.strip;
    sp.theta = r.state.theta;
    const CoefficientSet strip = extend_to_strip(push.c, sp);
    dump_matrix(assemble(strip, r.state.theta, c.bc), path.string());
}

int run_solve(RunConfig c) {
    json rep;
    const int code = solve_and_write(c, &rep);
    std::cout << rep.dump(2) << "\n";
    return code;
}

int run_check_estimates(const RunConfig& c) {
    const Grid2D X = config_grid(c);
    const std::vector<double> thetas = {1e-2, 1e-3, 1e-4};
    const auto rows = energy_suite(X, c.strip, thetas, 20, c.seed);
    bool positive = true;
    for (const EnergyRow& r : rows) {
        positive = positive && r.check.ratio > 0;
        std::cout << json{{"kind", "energy"},      {"theta", r.theta},         {"probe", r.probe},
                          {"lhs", r.check.lhs},    {"rhs", r.check.rhs},       {"ratio", r.check.ratio},
                          {"c2", r.check.c2}}
                         .dump()
                  << "\n";
    }
    for (double th : thetas)
        std::cout << json{{"kind", "energy_constant"}, {"theta", th}, {"c2", energy_constant(rows, th)}}.dump() << "\n";
    const TameReport t = model_tame(X, c.strip, 1e-2, 2, c.bc);
    std::cout << json{{"kind", "tame"},           {"theta", 1e-2},          {"s", t.s},
                      {"grid", grid_json(X)},     {"norm_u", t.norm_u},     {"norm_f", t.norm_f},
                      {"norm_f2", t.norm_f2},     {"lambda", t.lambda},     {"c_s", t.c_s},
                      {"rel_residual", t.rel_residual}, {"fallback", t.fallback}}
                     .dump()
              << "\n";
    return positive ? exit_ok : exit_stalled;
}

int run_demo_smoothing(const RunConfig& c) {
    const Grid2D X = config_grid(c);
    const std::vector<double> gammas = {2, 4, 8, 16};
    const SmoothingReport r = smoothing_constants(gammas, smoothing_probes(X));
    json cs = json::object(), sp = json::object();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const std::string k = std::to_string(a) + "," + std::to_string(b);
            cs[k] = r.c[a][b];
            sp[k] = r.spread[a][b];
        }
    std::cout << json{{"gammas", r.gammas}, {"constants", cs},          {"spread", sp},
                      {"rate", r.rate},     {"rate_slope", r.rate_slope}, {"pass", r.pass}}
                     .dump(2)
              << "\n";
    if (!c.out_dir.empty()) {
        fs::create_directories(c.out_dir);
        const std::vector<Field> probes = smoothing_probes(X);
        write_field((fs::path(c.out_dir) / "probe.field").string(), probes.front());
        write_field((fs::path(c.out_dir) / "probe_smoothed.field").string(), mollify(probes.front(), 4));
    }
    return r.pass ? exit_ok : exit_stalled;
}

}  // namespace

json to_json(const VerificationReport& r, Mode mode) {
    json j{{"ma_residual", stats(r.ma_residual)},
           {"ma_residual_scaled", stats(r.ma_residual_scaled)},
           {"grid", grid_json(r.grid)},
           {"hx", r.hx},
           {"hy", r.hy}};
    if (mode == Mode::curvature) {
        j["curvature_error"] = stats(r.curvature_error);
        j["curvature_error_scaled"] = stats(r.curvature_error_scaled);
    } else {
        j["flatness_residual"] = stats(r.flatness_residual);
        j["flatness_eq"] = stats(r.flatness_eq);
    }
    return j;
}

int solve_and_write(const RunConfig& c, json* report) {
    const ProblemSpec spec = build_problem(c);
    const fs::path dir(c.out_dir);
    fs::create_directories(dir);
    write_text(dir / "config.cfg", to_text(c));

    const Grid2D X = config_grid(c);
    const ScaledOperator op(spec, X);
    std::ofstream log(dir / "run.jsonl");
    if (!log) throw std::runtime_error("cannot write " + (dir / "run.jsonl").string());
    const RunResult r = run(op, c.schedule, c.strip, c.bc, [&](const StepRecord& s) { log << to_json(s).dump() << "\n"; });
    log.close();

    write_field((dir / "w.field").string(), r.w);
    write_field((dir / "w_inf.field").string(), r.w_inf);
    write_field((dir / "f.field").string(), r.state.f);
    write_field((dir / "z.field").string(), reconstruct_z(r.w_inf, spec));
    if (c.dump_matrix) dump_final_matrix(r, op, c, dir / "matrix.txt");

    const double lf = limit_factor(c.schedule);
    json rep{{"schema", 1},
             {"mode", c.mode},
             {"label", spec.label},
             {"status", r.status},
             {"message", r.message},
             {"solves", r.solves},
             {"iterations", r.log.size()},
             {"epsilon", c.epsilon},
             {"limit_factor", lf},
             {"norm_f1", r.f1_norm},
             {"norm_final", r.final_norm},
             {"fallback_flags", r.state.fallbacks}};
    rep["norm_decrease"] = r.final_norm > 0 ? json(r.f1_norm / r.final_norm) : json(nullptr);
    if (r.status != "aborted") {
        const VerificationReport v = verify_solution(spec, r.w, lf);
        rep["verification"] = to_json(v, spec.mode);
        const Block b = inner_block(X, 0.5 * lf * (X.x_max - X.x_min), 0.5 * lf * (X.y_max - X.y_min));
        const double phi = sup_on(op.phi_apply(r.w), b) * std::pow(c.epsilon, 5);
        rep["phi_estimate"] = phi;
        rep["ma_to_phi_ratio"] = phi > 0 ? json(v.ma_residual.sup / phi) : json(nullptr);
    }
    write_text(dir / "report.json", rep.dump(2) + "\n");
    if (report) *report = rep;
    if (r.status == "converged") return exit_ok;
    if (r.status == "stalled") return exit_stalled;
    return exit_error;
}

json verify_saved(const std::string& d) {
    const fs::path dir(d);
    const RunConfig c = load_config((dir / "config.cfg").string());
    const ProblemSpec spec = build_problem(c);
    const Field w = read_field((dir / "w.field").string());
    const double lf = limit_factor(c.schedule);
    json j{{"schema", 1}, {"mode", c.mode}, {"label", spec.label}};
    j["verification"] = to_json(verify_solution(spec, w, lf), spec.mode);
    const double now = j["verification"]["ma_residual"]["sup"].get<double>();
    if (fs::exists(dir / "report.json")) {
        const json saved = read_json(dir / "report.json");
        if (saved.contains("verification")) {
            const double before = saved["verification"]["ma_residual"]["sup"].get<double>();
            j["saved_ma_residual_sup"] = before;
            j["consistent"] = now <= 10 * before + 1e-300;
        }
    }
    write_text(dir / "verify.json", j.dump(2) + "\n");
    return j;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Local solver for degenerate Monge-Ampere equations"};
    app.require_subcommand(1);
    std::map<std::string, CLI::App*> sub;
    std::map<std::string, Flags> flag;
    for (const char* name : {"solve-curvature", "solve-embedding", "check-estimates", "verify", "demo-smoothing"}) {
        sub[name] = app.add_subcommand(name);
        flag[name].attach(sub[name]);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }
    try {
        RunConfig base;
        if (sub["solve-curvature"]->parsed()) {
            base.mode = "curvature";
            RunConfig c = flag["solve-curvature"].resolve(base);
            c.mode = "curvature";
            return run_solve(c);
        }
        if (sub["solve-embedding"]->parsed()) {
            base.mode = "embedding";
            RunConfig c = flag["solve-embedding"].resolve(base);
            c.mode = "embedding";
            return run_solve(c);
        }
        if (sub["check-estimates"]->parsed()) return run_check_estimates(flag["check-estimates"].resolve(base));
        if (sub["demo-smoothing"]->parsed()) {
            base.out_dir.clear();
            base.nx = base.ny = 257;
            return run_demo_smoothing(flag["demo-smoothing"].resolve(base));
        }
        if (sub["verify"]->parsed()) {
            const Flags& f = flag["verify"];
            if (!f.has("out")) throw std::invalid_argument("verify needs --out DIR of a saved run");
            const json j = verify_saved(f.out);
            std::cout << j.dump(2) << "\n";
            return j.value("consistent", true) ? exit_ok : exit_stalled;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}

}  // namespace ma
