#include "ma/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ma {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config field '" + key + "': " + why);
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) bad(key, "not a number: " + v);
        return d;
    } catch (const std::invalid_argument&) {
        bad(key, "not a number: " + v);
    } catch (const std::out_of_range&) {
        bad(key, "out of range: " + v);
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) bad(key, "not an integer: " + v);
        return d;
    } catch (const std::invalid_argument&) {
        bad(key, "not an integer: " + v);
    } catch (const std::out_of_range&) {
        bad(key, "out of range: " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "not a boolean: " + v);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> r;
    std::string s = v;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) r.push_back(to_real(key, tok));
    return r;
}

std::string fmt(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
    return s;
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig c) {
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> set = {
        {"mode", [&](auto& k, auto& v) {
             if (v != "curvature" && v != "embedding") bad(k, "expected curvature or embedding");
             c.mode = v;
         }},
        {"label", [&](auto&, auto& v) { c.label = v; }},
        {"K", [&](auto&, auto& v) { c.K = v; }},
        {"K_coeffs", [&](auto& k, auto& v) { c.K_coeffs = to_list(k, v); }},
        {"metric", [&](auto&, auto& v) { c.metric = v; }},
        {"metric_coeffs", [&](auto& k, auto& v) { c.metric_coeffs = to_list(k, v); }},
        {"normalize", [&](auto& k, auto& v) { c.normalize = to_bool(k, v); }},
        {"remainder", [&](auto& k, auto& v) { c.remainder = to_bool(k, v); }},
        {"epsilon", [&](auto& k, auto& v) { c.epsilon = to_real(k, v); }},
        {"nx", [&](auto& k, auto& v) { c.nx = int(to_int(k, v)); }},
        {"ny", [&](auto& k, auto& v) { c.ny = int(to_int(k, v)); }},
        {"x0", [&](auto& k, auto& v) { c.x0 = to_real(k, v); }},
        {"y0", [&](auto& k, auto& v) { c.y0 = to_real(k, v); }},
        {"mu", [&](auto& k, auto& v) { c.schedule.mu = to_real(k, v); }},
        {"tau", [&](auto& k, auto& v) { c.schedule.tau = to_real(k, v); }},
        {"n0", [&](auto& k, auto& v) { c.schedule.n0 = int(to_int(k, v)); }},
        {"theta0", [&](auto& k, auto& v) { c.schedule.theta0 = to_real(k, v); }},
        {"theta_decay", [&](auto& k, auto& v) { c.schedule.theta_decay = to_real(k, v); }},
        {"max_iter", [&](auto& k, auto& v) { c.schedule.max_iter = int(to_int(k, v)); }},
        {"s_star", [&](auto& k, auto& v) { c.schedule.s_star = int(to_int(k, v)); }},
        {"s_track", [&](auto& k, auto& v) { c.schedule.s_track = int(to_int(k, v)); }},
        {"tol", [&](auto& k, auto& v) { c.schedule.tol = to_real(k, v); }},
        {"stall_ratio", [&](auto& k, auto& v) { c.schedule.stall_ratio = to_real(k, v); }},
        {"stall_window", [&](auto& k, auto& v) { c.schedule.stall_window = int(to_int(k, v)); }},
        {"strip_y1", [&](auto& k, auto& v) { c.strip.y1 = to_real(k, v); }},
        {"strip_y2", [&](auto& k, auto& v) { c.strip.y2 = to_real(k, v); }},
        {"strip_y3", [&](auto& k, auto& v) { c.strip.y3 = to_real(k, v); }},
        {"strip_Y", [&](auto& k, auto& v) { c.strip.Y = to_real(k, v); }},
        {"strip_delta", [&](auto& k, auto& v) { c.strip.delta = to_real(k, v); }},
        {"strip_a11_curv", [&](auto& k, auto& v) { c.strip.a11_curv = to_real(k, v); }},
        {"bc", [&](auto& k, auto& v) {
             if (v == "dirichlet")
                 c.bc = BC::dirichlet;
             else if (v == "neumann_x")
                 c.bc = BC::neumann_x;
             else
                 bad(k, "expected dirichlet or neumann_x");
         }},
        {"seed", [&](auto& k, auto& v) {
             if (v.find('-') != std::string::npos) bad(k, "must be nonnegative");
             try {
                 std::size_t pos = 0;
                 c.seed = std::stoull(v, &pos);
                 if (pos != v.size()) bad(k, "not an integer: " + v);
             } catch (const std::logic_error&) {
                 bad(k, "not an integer: " + v);
             }
         }},
        {"dump_matrix", [&](auto& k, auto& v) { c.dump_matrix = to_bool(k, v); }},
    };
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(ln) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        const auto it = set.find(key);
        if (it == set.end()) bad(key, "unknown key");
        if (val.empty() && key != "label" && key != "metric_coeffs") bad(key, "empty value");
        it->second(key, val);
    }
    c.strip.y0 = c.y0;
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string to_text(const RunConfig& c) {
    std::ostringstream o;
    o << "mode = " << c.mode << "\n";
    o << "label = " << c.label << "\n";
    o << "K = " << c.K << "\n";
    o << "K_coeffs = " << fmt_list(c.K_coeffs) << "\n";
    o << "metric = " << c.metric << "\n";
    o << "metric_coeffs = " << fmt_list(c.metric_coeffs) << "\n";
    o << "normalize = " << (c.normalize ? "true" : "false") << "\n";
    o << "remainder = " << (c.remainder ? "true" : "false") << "\n";
    o << "epsilon = " << fmt(c.epsilon) << "\n";
    o << "nx = " << c.nx << "\nny = " << c.ny << "\n";
    o << "x0 = " << fmt(c.x0) << "\ny0 = " << fmt(c.y0) << "\n";
    const Schedule& s = c.schedule;
    o << "mu = " << fmt(s.mu) << "\ntau = " << fmt(s.tau) << "\nn0 = " << s.n0 << "\n";
    o << "theta0 = " << fmt(s.theta0) << "\ntheta_decay = " << fmt(s.theta_decay) << "\n";
    o << "max_iter = " << s.max_iter << "\ns_star = " << s.s_star << "\ns_track = " << s.s_track << "\n";
    o << "tol = " << fmt(s.tol) << "\nstall_ratio = " << fmt(s.stall_ratio) << "\nstall_window = " << s.stall_window << "\n";
    const StripParams& p = c.strip;
    o << "strip_y1 = " << fmt(p.y1) << "\nstrip_y2 = " << fmt(p.y2) << "\nstrip_y3 = " << fmt(p.y3) << "\n";
    o << "strip_Y = " << fmt(p.Y) << "\nstrip_delta = " << fmt(p.delta) << "\nstrip_a11_curv = " << fmt(p.a11_curv) << "\n";
    o << "bc = " << (c.bc == BC::dirichlet ? "dirichlet" : "neumann_x") << "\n";
    o << "seed = " << c.seed << "\n";
    o << "dump_matrix = " << (c.dump_matrix ? "true" : "false") << "\n";
    return o.str();
}

void validate(const RunConfig& c) {
    if (c.nx < 9 || c.ny < 9) bad(c.nx < 9 ? "nx" : "ny", "grid needs at least 9 nodes per axis");
    if (!(c.epsilon > 0 && c.epsilon < 0.5)) bad("epsilon", "must lie in (0, 0.5)");
    if (!(c.x0 > 0)) bad("x0", "must be positive");
    if (!(c.y0 > 0)) bad("y0", "must be positive");
    try {
        validate(c.schedule);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config ") + e.what());
    }
    try {
        validate(c.strip);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config ") + e.what());
    }
}

Grid2D config_grid(const RunConfig& c) { return Grid2D(-c.x0, c.x0, -c.y0, c.y0, c.nx, c.ny); }

ProblemSpec build_problem(const RunConfig& c) {
    validate(c);
    ProblemSpec p;
    try {
        if (c.mode == "curvature")
            p = curvature_problem(builtin_K(c.K, c.K_coeffs), c.epsilon, c.normalize);
        else
            p = metric_to_problem(builtin_metric(c.metric, c.metric_coeffs), c.epsilon);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config field '") + (c.mode == "curvature" ? "K" : "metric") + "': " + e.what());
    }
    p.label = c.label.empty() ? (c.mode == "curvature" ? c.K : c.metric) : c.label;
    p.x0 = c.x0;
    p.y0 = c.y0;
    p.remainder = c.remainder;
    validate(p);
    return p;
}

}  // namespace ma
