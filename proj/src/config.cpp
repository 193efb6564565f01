#include "slidecyc/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slidecyc {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& tok, int line_no) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": not a number: " + tok);
    }
    if (pos != tok.size())
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": trailing junk in number: " + tok);
    return out;
}

ConfigValue parse_value(const std::string& raw, int line_no) {
    ConfigValue cv;
    const std::string s = trim(raw);
    if (s.empty())
        throw std::runtime_error("config line " + std::to_string(line_no) + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": unterminated string");
        cv.v = s.substr(1, s.size() - 2);
        return cv;
    }
    if (s == "true" || s == "false") {
        cv.v = (s == "true");
        return cv;
    }
    if (s.front() == '[') {
        if (s.back() != ']')
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": unterminated array");
        std::vector<double> arr;
        std::string body = s.substr(1, s.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            arr.push_back(parse_number(item, line_no));
        }
        cv.v = std::move(arr);
        return cv;
    }
    cv.v = parse_number(s, line_no);
    return cv;
}

}  // namespace

double ConfigValue::as_number() const {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw std::runtime_error("config value is not a number");
}
const std::string& ConfigValue::as_string() const {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw std::runtime_error("config value is not a string");
}
bool ConfigValue::as_bool() const {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw std::runtime_error("config value is not a boolean");
}
const std::vector<double>& ConfigValue::as_array() const {
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    throw std::runtime_error("config value is not an array");
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line, cur;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": malformed section header");
            cur = trim(line.substr(1, line.size() - 2));
            if (cur.empty())
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": empty section name");
            cfg.sections_[cur];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty() || cur.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": key outside a section or empty key");
        cfg.sections_[cur][key] = parse_value(line.substr(eq + 1), line_no);
    }
    return cfg;
}

bool Config::has(const std::string& section) const { return sections_.count(section) > 0; }
bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}
const ConfigValue& Config::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) throw std::runtime_error("missing config section [" + section + "]");
    auto jt = it->second.find(key);
    if (jt == it->second.end())
        throw std::runtime_error("missing config key " + section + "." + key);
    return jt->second;
}
double Config::number_or(const std::string& section, const std::string& key, double dflt) const {
    return has(section, key) ? get(section, key).as_number() : dflt;
}
const std::map<std::string, ConfigValue>& Config::section(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end()) throw std::runtime_error("missing config section [" + name + "]");
    return it->second;
}

namespace {

// Keys: x_i_j / y_i_j for the base polynomials, x_lambda_i_j / y_lambda_i_j
// for the lambda-coupled parts.
SmoothField field_from_section(const std::map<std::string, ConfigValue>& sec,
                               const std::string& where) {
    Poly2 X, Y, Xl, Yl;
    for (const auto& [key, val] : sec) {
        std::string rest;
        Poly2* target = nullptr;
        if (key.rfind("x_lambda_", 0) == 0) {
            target = &Xl;
            rest = key.substr(9);
        } else if (key.rfind("y_lambda_", 0) == 0) {
            target = &Yl;
            rest = key.substr(9);
        } else if (key.rfind("x_", 0) == 0) {
            target = &X;
            rest = key.substr(2);
        } else if (key.rfind("y_", 0) == 0) {
            target = &Y;
            rest = key.substr(2);
        } else {
            throw std::runtime_error("unknown key " + where + "." + key);
        }
        const size_t us = rest.find('_');
        if (us == std::string::npos)
            throw std::runtime_error("bad monomial key " + where + "." + key);
        int i, j;
        try {
            i = std::stoi(rest.substr(0, us));
            j = std::stoi(rest.substr(us + 1));
        } catch (const std::exception&) {
            throw std::runtime_error("bad monomial exponents in " + where + "." + key);
        }
        if (i < 0 || j < 0 || i > 16 || j > 16)
            throw std::runtime_error("monomial exponents out of range in " + where + "." + key);
        *target = *target + Poly2::monomial(i, j, val.as_number());
    }
    return SmoothField::polynomial(X, Y, Xl, Yl);
}

}  // namespace

void apply_tolerances(const Config& cfg, Tolerances& tol) {
    if (!cfg.has("tolerances")) return;
    tol.tau_sw = cfg.number_or("tolerances", "tau_sw", tol.tau_sw);
    tol.tau_mult = cfg.number_or("tolerances", "tau_mult", tol.tau_mult);
    tol.tau_margin = cfg.number_or("tolerances", "tau_margin", tol.tau_margin);
    tol.quad_rel = cfg.number_or("tolerances", "quad_rel", tol.quad_rel);
    tol.ode_abs = cfg.number_or("tolerances", "ode_abs", tol.ode_abs);
    tol.ode_rel = cfg.number_or("tolerances", "ode_rel", tol.ode_rel);
    tol.event_tol = cfg.number_or("tolerances", "event_tol", tol.event_tol);
    tol.grid_nodes = static_cast<int>(cfg.number_or("tolerances", "grid_nodes", tol.grid_nodes));
    tol.m_max = static_cast<int>(cfg.number_or("tolerances", "m_max", tol.m_max));
    tol.t_max = cfg.number_or("tolerances", "t_max", tol.t_max);
    tol.box = cfg.number_or("tolerances", "box", tol.box);
    tol.delta_hausdorff = cfg.number_or("tolerances", "delta_hausdorff", tol.delta_hausdorff);
}

Problem load_problem(const Config& cfg) {
    Problem p;
    if (cfg.has("pwl")) {
        PwlCoefficients k;
        k.d_minus = cfg.number_or("pwl", "d_minus", 0.0);
        k.t_minus = cfg.number_or("pwl", "t_minus", 0.0);
        k.b_plus = cfg.number_or("pwl", "b_plus", 2.0);
        k.a11 = cfg.number_or("pwl", "a11", 1.0);
        k.a12 = cfg.number_or("pwl", "a12", 0.0);
        k.a21 = cfg.number_or("pwl", "a21", 1.0);
        k.a22 = cfg.number_or("pwl", "a22", 0.0);
        p.model = build_pwl(k);
        p.pwl = k;
    } else if (cfg.has("upper") && cfg.has("lower")) {
        p.model.upper = field_from_section(cfg.section("upper"), "upper");
        p.model.lower = field_from_section(cfg.section("lower"), "lower");
    } else {
        throw std::runtime_error("config must define either [pwl] or both [upper] and [lower]");
    }
    if (cfg.has("regularization", "family"))
        p.reg = Regularization::by_name(cfg.get("regularization", "family").as_string());
    p.ctx.eps = cfg.number_or("context", "eps", 0.05);
    p.ctx.lambda_tilde = cfg.number_or("context", "lambda_tilde", 0.0);
    p.ctx.s_max = cfg.number_or("context", "s_max", 50.0);
    apply_tolerances(cfg, p.tol);
    p.eta_plus = cfg.number_or("analysis", "eta_plus", 1.0);
    return p;
}

}  // namespace slidecyc
