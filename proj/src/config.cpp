#include "sbthermo/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace sbt {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError("config: trailing characters in value for '" + key + "'");
    return v;
}

long parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v))
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    return static_cast<long>(v);
}

}  // namespace

std::vector<std::string> RunConfig::preset_names() {
    return {"unbiased-nonadiabatic", "biased-nonadiabatic", "biased-adiabatic"};
}

RunConfig RunConfig::from_preset(const std::string& name) {
    RunConfig cfg;
    cfg.preset_name = name;
    // Parameter sets are the paper regimes; hierarchy settings pinned by the
    // convergence scan (see `sbthermo scan`).
    if (name == "unbiased-nonadiabatic") {
        cfg.epsilon = 0.0;
        cfg.delta = 0.2;
        cfg.alpha = 0.3;
        cfg.beta = 25.0;
        cfg.n_pade = 8;
        cfg.l_max = 5;
        cfg.dt = 0.005;
        cfg.t_final = 50.0;
        cfg.grid_stride = 2;
    } else if (name == "biased-nonadiabatic") {
        cfg.epsilon = 0.5;  // epsilon / delta = 2.5
        cfg.delta = 0.2;
        cfg.alpha = 0.3;
        cfg.beta = 25.0;
        cfg.n_pade = 8;
        cfg.l_max = 5;
        cfg.dt = 0.005;
        cfg.t_final = 50.0;
        cfg.grid_stride = 2;
    } else if (name == "biased-adiabatic") {
        cfg.epsilon = 0.5;  // epsilon / delta = 0.1
        cfg.delta = 5.0;
        cfg.alpha = 1.0;
        cfg.beta = 25.0;
        cfg.n_pade = 8;
        cfg.l_max = 6;
        cfg.dt = 0.001;
        cfg.t_final = 60.0;
        cfg.grid_stride = 1;
    } else {
        throw ConfigError("config: unknown preset '" + name + "'");
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path.string());

    // First pass: collect key/value pairs in order; `preset` must seed
    // defaults before other keys override them.
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value on line " + std::to_string(line_no));
        pairs.emplace_back(key, value);
    }

    RunConfig cfg;
    bool preset_seen = false;
    for (const auto& [key, value] : pairs) {
        if (key == "preset") {
            if (preset_seen) throw ConfigError("config: duplicate 'preset' key");
            cfg = from_preset(value);
            preset_seen = true;
        }
    }
    if (!preset_seen) cfg.preset_name = "custom";

    std::map<std::string, int> seen;
    for (const auto& [key, value] : pairs) {
        if (++seen[key] > 1 && key != "preset")
            throw ConfigError("config: duplicate key '" + key + "'");
        if (key == "preset") continue;

        if (key == "system.epsilon_over_omega_c") cfg.epsilon = parse_double(key, value);
        else if (key == "system.delta_over_omega_c") cfg.delta = parse_double(key, value);
        else if (key == "bath.alpha") cfg.alpha = parse_double(key, value);
        else if (key == "bath.beta_omega_c") cfg.beta = parse_double(key, value);
        else if (key == "bath.n_pade") cfg.n_pade = static_cast<int>(parse_int(key, value));
        else if (key == "heom.l_max") cfg.l_max = static_cast<int>(parse_int(key, value));
        else if (key == "heom.dt_omega_c") cfg.dt = parse_double(key, value);
        else if (key == "heom.t_final_omega_c") cfg.t_final = parse_double(key, value);
        else if (key == "heom.max_ados") cfg.max_ados = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "heom.integrator") {
            if (value == "rk4") cfg.integrator = IntegratorKind::rk4;
            else if (value == "rk45") cfg.integrator = IntegratorKind::rk45;
            else throw ConfigError("config: heom.integrator must be rk4 or rk45");
        } else if (key == "heom.coupling_convention") {
            if (value == "standard") cfg.convention = CouplingConvention::standard;
            else if (value == "paper-literal") cfg.convention = CouplingConvention::paper_literal;
            else throw ConfigError("config: heom.coupling_convention must be standard or paper-literal");
        } else if (key == "initial_state") {
            if (value == "ground") cfg.initial_state = InitialStateKind::ground;
            else if (value == "excited") cfg.initial_state = InitialStateKind::excited;
            else if (value == "plus") cfg.initial_state = InitialStateKind::plus;
            else if (value == "mixed") cfg.initial_state = InitialStateKind::mixed;
            else if (value == "custom") cfg.initial_state = InitialStateKind::custom;
            else throw ConfigError("config: initial_state must be ground|excited|plus|mixed|custom");
        } else if (key == "initial_state.rho00") cfg.rho00 = parse_double(key, value);
        else if (key == "initial_state.rho01_re") cfg.rho01_re = parse_double(key, value);
        else if (key == "initial_state.rho01_im") cfg.rho01_im = parse_double(key, value);
        else if (key == "output.directory") cfg.output_directory = value;
        else if (key == "output.grid_stride") cfg.grid_stride = static_cast<int>(parse_int(key, value));
        else if (key == "tomography.cond_bound") cfg.cond_bound = parse_double(key, value);
        else if (key == "scan.tolerance") cfg.scan_tolerance = parse_double(key, value);
        else if (key == "scan.t_final_omega_c") cfg.scan_t_final = parse_double(key, value);
        else throw ConfigError("config: unknown key '" + key + "'");
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (!(alpha >= 0.0 && alpha <= 2.0)) fail("bath.alpha must be in [0, 2]");
    if (!(beta > 0.0 && beta <= 100.0)) fail("bath.beta_omega_c must be in (0, 100]");
    if (!(n_pade >= 1 && n_pade <= 64)) fail("bath.n_pade must be in [1, 64]");
    if (!(l_max >= 0 && l_max <= 32)) fail("heom.l_max must be in [0, 32]");
    if (!(std::abs(epsilon) <= 100.0)) fail("system.epsilon_over_omega_c out of range");
    if (!(delta >= 0.0 && delta <= 100.0)) fail("system.delta_over_omega_c out of range");
    if (!(dt > 0.0 && dt <= 1.0)) fail("heom.dt_omega_c must be in (0, 1]");
    if (!(t_final > 0.0 && t_final <= 10000.0)) fail("heom.t_final_omega_c out of range");
    if (!(grid_stride >= 1)) fail("output.grid_stride must be >= 1");
    if (!(max_ados >= 1)) fail("heom.max_ados must be >= 1");
    if (!(cond_bound > 1.0)) fail("tomography.cond_bound must be > 1");
    if (!(scan_tolerance > 0.0)) fail("scan.tolerance must be > 0");
    const double grid = dt * grid_stride;
    const double n = t_final / grid;
    if (std::abs(n - std::round(n)) > 1e-9)
        fail("heom.dt_omega_c * output.grid_stride must divide heom.t_final_omega_c");
    if (initial_state == InitialStateKind::custom) {
        if (!(rho00 >= 0.0 && rho00 <= 1.0)) fail("initial_state.rho00 must be in [0, 1]");
        const double coh2 = rho01_re * rho01_re + rho01_im * rho01_im;
        if (coh2 > rho00 * (1.0 - rho00) + 1e-12)
            fail("initial_state coherence violates positivity");
    }
}

Mat2 RunConfig::initial_density_matrix() const {
    switch (initial_state) {
        case InitialStateKind::ground:
            return (Mat2() << 1, 0, 0, 0).finished();
        case InitialStateKind::excited:
            return (Mat2() << 0, 0, 0, 1).finished();
        case InitialStateKind::plus:
            return 0.5 * (identity2() + sigma_x());
        case InitialStateKind::mixed:
            return 0.5 * identity2();
        case InitialStateKind::custom: {
            Mat2 rho;
            rho(0, 0) = rho00;
            rho(1, 1) = 1.0 - rho00;
            rho(0, 1) = std::complex<double>(rho01_re, rho01_im);
            rho(1, 0) = std::conj(rho(0, 1));
            return rho;
        }
    }
    throw ConfigError("config: invalid initial state");
}

std::vector<std::string> RunConfig::canonical_lines() const {
    std::vector<std::string> lines;
    const auto add = [&](const std::string& key, const std::string& value) {
        lines.push_back(key + " = " + value);
    };
    add("system.epsilon_over_omega_c", format_double(epsilon));
    add("system.delta_over_omega_c", format_double(delta));
    add("bath.alpha", format_double(alpha));
    add("bath.beta_omega_c", format_double(beta));
    add("bath.n_pade", std::to_string(n_pade));
    add("heom.l_max", std::to_string(l_max));
    add("heom.dt_omega_c", format_double(dt));
    add("heom.t_final_omega_c", format_double(t_final));
    add("heom.integrator", integrator == IntegratorKind::rk4 ? "rk4" : "rk45");
    add("heom.coupling_convention",
        convention == CouplingConvention::standard ? "standard" : "paper-literal");
    add("heom.max_ados", std::to_string(max_ados));
    switch (initial_state) {
        case InitialStateKind::ground: add("initial_state", "ground"); break;
        case InitialStateKind::excited: add("initial_state", "excited"); break;
        case InitialStateKind::plus: add("initial_state", "plus"); break;
        case InitialStateKind::mixed: add("initial_state", "mixed"); break;
        case InitialStateKind::custom:
            add("initial_state", "custom");
            add("initial_state.rho00", format_double(rho00));
            add("initial_state.rho01_re", format_double(rho01_re));
            add("initial_state.rho01_im", format_double(rho01_im));
            break;
    }
    add("output.grid_stride", std::to_string(grid_stride));
    add("tomography.cond_bound", format_double(cond_bound));
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const std::string& line : canonical_lines()) {
        for (char c : line) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace sbt
