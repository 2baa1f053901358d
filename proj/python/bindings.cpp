#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ma/cli.hpp"
#include "ma/estimates.hpp"
#include "ma/smoothing.hpp"

namespace py = pybind11;
using namespace ma;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const Field& f) {
    Array a({f.grid.nx, f.grid.ny});
    std::copy(f.v.begin(), f.v.end(), a.mutable_data());
    return a;
}

Field from_numpy(const Array& a, const Grid2D& g) {
    if (a.ndim() != 2 || a.shape(0) != g.nx || a.shape(1) != g.ny)
        throw std::invalid_argument("array shape does not match the grid");
    return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Grid2D grid_for(const Array& a, std::pair<double, double> xr, std::pair<double, double> yr) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
    return Grid2D(xr.first, xr.second, yr.first, yr.second, int(a.shape(0)), int(a.shape(1)));
}

py::dict run_dict(const std::string& text) {
    const RunConfig c = parse_config(text);
    const ProblemSpec spec = build_problem(c);
    const ScaledOperator op(spec, config_grid(c));
    std::vector<std::string> lines;
    const RunResult r = run(op, c.schedule, c.strip, c.bc, [&](const StepRecord& s) { lines.push_back(to_json(s).dump()); });
    py::dict d;
    d["status"] = r.status;
    d["message"] = r.message;
    d["solves"] = r.solves;
    d["norm_f1"] = r.f1_norm;
    d["norm_final"] = r.final_norm;
    d["w"] = to_numpy(r.w);
    d["w_inf"] = to_numpy(r.w_inf);
    d["log"] = lines;
    if (r.status != "aborted")
        d["verification"] = to_json(verify_solution(spec, r.w, limit_factor(c.schedule)), spec.mode).dump();
    return d;
}

}  // namespace

PYBIND11_MODULE(_mongeamp, m) {
    m.doc() = "Local Nash-Moser solver for degenerate Monge-Ampere equations";

    m.def("run", &run_dict, py::arg("config") = "", "Solve in memory from config text; JSON payloads are strings.");
    m.def(
        "solve",
        [](const std::string& text, const std::string& out_dir) {
            RunConfig c = parse_config(text);
            c.out_dir = out_dir;
            nlohmann::json rep;
            const int code = solve_and_write(c, &rep);
            return py::make_tuple(code, rep.dump());
        },
        py::arg("config"), py::arg("out_dir"), "Solve and write the run artifacts; returns (exit code, report JSON).");
    m.def(
        "verify", [](const std::string& dir) { return verify_saved(dir).dump(); }, py::arg("out_dir"));
    m.def(
        "cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "ma_cli");
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            return cli_main(int(argv.size()), argv.data());
        },
        py::arg("args"));
    m.def(
        "canonical_config", [](const std::string& text) { return to_text(parse_config(text)); }, py::arg("config"));

    m.def(
        "mollify",
        [](const Array& a, double gamma, std::pair<double, double> xr, std::pair<double, double> yr) {
            const Grid2D g = grid_for(a, xr, yr);
            return to_numpy(mollify(from_numpy(a, g), gamma));
        },
        py::arg("values"), py::arg("gamma"), py::arg("x_range") = std::make_pair(-1.0, 1.0),
        py::arg("y_range") = std::make_pair(-1.0, 1.0));
    m.def(
        "graph_curvature",
        [](const Array& z, std::pair<double, double> ur, std::pair<double, double> vr) {
            const Grid2D g = grid_for(z, ur, vr);
            return to_numpy(graph_curvature(from_numpy(z, g)));
        },
        py::arg("z"), py::arg("u_range"), py::arg("v_range"));
    m.def(
        "read_field",
        [](const std::string& path) {
            const Field f = read_field(path);
            const Grid2D& g = f.grid;
            return py::make_tuple(to_numpy(f), py::make_tuple(g.x_min, g.x_max, g.y_min, g.y_max));
        },
        py::arg("path"));
    m.def(
        "write_field",
        [](const std::string& path, const Array& a, std::pair<double, double> xr, std::pair<double, double> yr) {
            write_field(path, from_numpy(a, grid_for(a, xr, yr)));
        },
        py::arg("path"), py::arg("values"), py::arg("x_range"), py::arg("y_range"));

    m.def("delta", [](double tau) {
        Schedule s;
        s.tau = tau;
        return delta_of(s);
    });
    m.def(
        "mu_n",
        [](double mu, double tau, int n0, int n) {
            Schedule s;
            s.mu = mu;
            s.tau = tau;
            s.n0 = n0;
            return mu_of(s, n);
        },
        py::arg("mu"), py::arg("tau"), py::arg("n0"), py::arg("n"));
    m.def("limit_factor", [](double mu) {
        Schedule s;
        s.mu = mu;
        return limit_factor(s);
    });

    m.def(
        "energy_constants",
        [](int nx, int ny, std::vector<double> thetas, int probes, std::uint64_t seed) {
            const auto rows = energy_suite(Grid2D(-1, 1, -1, 1, nx, ny), StripParams{}, thetas, probes, seed);
            py::list out;
            for (const EnergyRow& r : rows) {
                py::dict d;
                d["theta"] = r.theta;
                d["probe"] = r.probe;
                d["ratio"] = r.check.ratio;
                d["c2"] = r.check.c2;
                out.append(d);
            }
            return out;
        },
        py::arg("nx"), py::arg("ny"), py::arg("thetas"), py::arg("probes") = 20, py::arg("seed") = 1);
    m.def(
        "tame_constant",
        [](int nx, int ny, double theta, int s) { return model_tame(Grid2D(-1, 1, -1, 1, nx, ny), StripParams{}, theta, s).c_s; },
        py::arg("nx"), py::arg("ny"), py::arg("theta") = 1e-2, py::arg("s") = 2);
    m.def(
        "smoothing_rate_slope",
        [](int n, std::vector<double> gammas) {
            const Grid2D g(-1, 1, -1, 1, n, n);
            return smoothing_constants(gammas, smoothing_probes(g)).rate_slope;
        },
        py::arg("n") = 257, py::arg("gammas") = std::vector<double>{2, 4, 8, 16});
}
