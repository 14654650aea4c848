#include "fkpp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fkpp {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("config: '" + key + "' must be an integer");
    return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(to_double(key, tok));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config: empty key or value at line " + std::to_string(lineno));

        if (key == "kind") {
            if (val != "kpp" && val != "combustion")
                throw ConfigError("config: kind must be kpp or combustion");
            cfg.kind = val;
        } else if (key == "p")
            cfg.p = to_double(key, val);
        else if (key == "scale")
            cfg.scale = to_double(key, val);
        else if (key == "sigma")
            cfg.sigma = to_double(key, val);
        else if (key == "theta")
            cfg.theta = to_double(key, val);
        else if (key == "s")
            cfg.s = to_double(key, val);
        else if (key == "left_end")
            cfg.left_end = to_double(key, val);
        else if (key == "right_end")
            cfg.right_end = to_double(key, val);
        else if (key == "n_points")
            cfg.n_points = to_int(key, val);
        else if (key == "epsilon")
            cfg.epsilon = to_double(key, val);
        else if (key == "mu")
            cfg.mu = to_double(key, val);
        else if (key == "lambda_shift")
            cfg.lambda_shift = to_double(key, val);
        else if (key == "tol_iter")
            cfg.tol_iter = to_double(key, val);
        else if (key == "tol_norm")
            cfg.tol_norm = to_double(key, val);
        else if (key == "tol_mono")
            cfg.tol_mono = to_double(key, val);
        else if (key == "tol_right")
            cfg.tol_right = to_double(key, val);
        else if (key == "mu_tol")
            cfg.mu_tol = to_double(key, val);
        else if (key == "max_iters")
            cfg.max_iters = to_int(key, val);
        else if (key == "max_right_extends")
            cfg.max_right_extends = to_int(key, val);
        else if (key == "epsilon_schedule")
            cfg.epsilon_schedule = to_list(key, val);
        else if (key == "sigma_schedule")
            cfg.sigma_schedule = to_list(key, val);
        else if (key == "mu_list")
            cfg.mu_list = to_list(key, val);
        else
            throw ConfigError("config: unknown key '" + key + "'");
    }

    // validate ranges now by constructing the domain objects once
    try {
        cfg.nonlinearity();
        cfg.order();
        cfg.grid();
        cfg.solve_params();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Nonlinearity RunConfig::nonlinearity() const {
    if (kind == "combustion") return Nonlinearity::combustion_cutoff(p, scale, sigma);
    Nonlinearity f = Nonlinearity::generalized_kpp(p, scale, theta);
    return f;
}

FractionalOrder RunConfig::order() const { return FractionalOrder(s); }

GridSpec RunConfig::grid() const {
    return GridSpec(left_end, right_end, n_points, TailModel::constant(0.0),
                    TailModel::constant(1.0));
}

SolveParams RunConfig::solve_params() const {
    SolveParams sp;
    sp.epsilon = epsilon;
    sp.mu = mu;
    sp.lambda_shift = lambda_shift;
    sp.r = -left_end;
    sp.tol_iter = tol_iter;
    sp.tol_norm = tol_norm;
    sp.tol_mono = tol_mono;
    sp.tol_right = tol_right;
    sp.mu_tol = mu_tol;
    sp.max_iters = max_iters;
    sp.max_right_extends = max_right_extends;
    sp.epsilon_schedule = epsilon_schedule;
    sp.sigma_schedule = sigma_schedule;
    if (!(sp.tol_iter > 0.0) || !(sp.tol_norm > 0.0) || !(sp.tol_mono > 0.0))
        throw ConfigError("config: tolerances must be > 0");
    if (sp.max_iters <= 0) throw ConfigError("config: max_iters must be positive");
    return sp;
}

}  // namespace fkpp
