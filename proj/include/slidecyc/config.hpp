#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slidecyc/model.hpp"
#include "slidecyc/pwl.hpp"
#include "slidecyc/regularization.hpp"

namespace slidecyc {

/// Minimal structured-text config: [section] headers, key = value lines,
/// values are numbers, quoted strings, booleans, or arrays of numbers.
struct ConfigValue {
    std::variant<double, std::string, bool, std::vector<double>> v;

    double as_number() const;
    const std::string& as_string() const;
    bool as_bool() const;
    const std::vector<double>& as_array() const;
};

class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    const ConfigValue& get(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key, double dflt) const;
    const std::map<std::string, ConfigValue>& section(const std::string& name) const;

private:
    std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

/// Fully loaded analysis problem.
struct Problem {
    PwsModel model;
    std::optional<PwlCoefficients> pwl;  // set when the model came from [pwl]
    Regularization reg = Regularization::arctan();
    RegularizedContext ctx;
    Tolerances tol;
    double eta_plus = 1.0;
};

Problem load_problem(const Config& cfg);

/// Tolerance overrides from a [tolerances] section (same key names as fields).
void apply_tolerances(const Config& cfg, Tolerances& tol);

}  // namespace slidecyc
