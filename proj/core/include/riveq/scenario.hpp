#ifndef RIVEQ_SCENARIO_HPP
#define RIVEQ_SCENARIO_HPP

#include <map>
#include <string>
#include <vector>

#include "riveq/evolution.hpp"
#include "riveq/system.hpp"

namespace riveq {

/// Flat [section] key = value scenario file.
///
/// [system]: W (quartic|polynomial|composite) with W_scale / W_coeffs /
/// W_pieces, eval_bound, ell (linear|sine|piecewise) with its parameters,
/// alpha_plus, alpha_minus, delta (none|quadratic|convex_of_psi) with mu or
/// f_coefficient/f_exponent.
/// [run]: interval, u0, partition, levels, tie_rule, samples.
/// [output]: csv_dir, svg, sample density.
class ScenarioConfig {
public:
    static ScenarioConfig parse_file(const std::string& path);
    static ScenarioConfig parse_string(const std::string& text);

    RISystem build_system() const;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

    double t_begin() const;
    double t_end() const;
    double u0() const;
    int base_steps() const { return get_int_or("run", "partition", 1024); }
    int levels() const { return get_int_or("run", "levels", 4); }
    int output_samples() const { return get_int_or("output", "samples", 512); }
    bool svg_enabled() const { return get_bool_or("output", "svg", false); }
    std::string csv_dir() const { return get_or("output", "csv_dir", "out"); }
    TieRule tie_rule() const;

    /// Overrides the quadratic correction strength (sweep runs).
    void set_mu(double mu);

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace riveq

#endif
