#include "riveq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace riveq {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<double> parse_numbers(const std::string& s, char sep = ' ') {
    std::vector<double> out;
    std::istringstream is(s);
    if (sep == ' ') {
        double x;
        while (is >> x) out.push_back(x);
    } else {
        for (const std::string& tok : split(s, sep)) {
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                throw ConfigError("bad number: " + tok);
            }
        }
    }
    return out;
}

} // namespace

ScenarioConfig ScenarioConfig::parse_string(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
        cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_string(os.str());
}

bool ScenarioConfig::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ScenarioConfig::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("missing config key [" + section + "] " + key);
    return s->second.at(key);
}

std::string ScenarioConfig::get_or(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double ScenarioConfig::get_double(const std::string& section, const std::string& key) const {
    try {
        return std::stod(get(section, key));
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("bad numeric value for [" + section + "] " + key);
    }
}

double ScenarioConfig::get_double_or(const std::string& section, const std::string& key,
                                     double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ScenarioConfig::get_int_or(const std::string& section, const std::string& key,
                               int fallback) const {
    return has(section, key) ? static_cast<int>(get_double(section, key)) : fallback;
}

bool ScenarioConfig::get_bool_or(const std::string& section, const std::string& key,
                                 bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean value for [" + section + "] " + key);
}

double ScenarioConfig::t_begin() const {
    const auto iv = parse_numbers(get("run", "interval"));
    if (iv.size() != 2) throw ConfigError("[run] interval needs two numbers");
    return iv[0];
}

double ScenarioConfig::t_end() const {
    const auto iv = parse_numbers(get("run", "interval"));
    if (iv.size() != 2) throw ConfigError("[run] interval needs two numbers");
    return iv[1];
}

double ScenarioConfig::u0() const { return get_double("run", "u0"); }

TieRule ScenarioConfig::tie_rule() const {
    const std::string r = get_or("run", "tie_rule", "nearest_left");
    if (r == "nearest_left") return TieRule::nearest_left;
    if (r == "nearest_right") return TieRule::nearest_right;
    if (r == "global_min") return TieRule::global_min;
    throw ConfigError("unknown tie_rule: " + r);
}

void ScenarioConfig::set_mu(double mu) {
    std::ostringstream os;
    os.precision(17);
    os << mu;
    sections_["system"]["delta"] = "quadratic";
    sections_["system"]["mu"] = os.str();
}

RISystem ScenarioConfig::build_system() const {
    const double a = t_begin(), b = t_end();
    const double eval_bound = get_double_or("system", "eval_bound", 1e3);

    EnergyDensity W = EnergyDensity::quartic_double_well();
    const std::string wkind = get_or("system", "W", "quartic");
    if (wkind == "quartic" || wkind == "quartic_double_well") {
        W = EnergyDensity::quartic_double_well(get_double_or("system", "W_scale", 1.0),
                                               eval_bound);
    } else if (wkind == "polynomial") {
        W = EnergyDensity::polynomial(parse_numbers(get("system", "W_coeffs")), eval_bound);
    } else if (wkind == "composite") {
        std::vector<CompositePiece> pieces;
        for (const std::string& ps : split(get("system", "W_pieces"), '|')) {
            const auto fields = split(ps, ':');
            if (fields.size() != 3) throw ConfigError("W_pieces: expected lo:hi:coeffs");
            pieces.push_back({std::stod(fields[0]), std::stod(fields[1]),
                              Polynomial(parse_numbers(fields[2], ','))});
        }
        W = EnergyDensity::composite(std::move(pieces), eval_bound);
    } else {
        throw ConfigError("unknown W kind: " + wkind);
    }

    Loading ell = Loading::linear(1.0, 0.0, a, b);
    const std::string lkind = get_or("system", "ell", "linear");
    if (lkind == "linear") {
        ell = Loading::linear(get_double_or("system", "ell_slope", 1.0),
                              get_double_or("system", "ell_intercept", 0.0), a, b);
    } else if (lkind == "sine") {
        ell = Loading::sine(get_double_or("system", "ell_amplitude", 1.0),
                            get_double_or("system", "ell_frequency", 1.0),
                            get_double_or("system", "ell_phase", 0.0), a, b);
    } else if (lkind == "piecewise") {
        std::vector<Loading::Segment> segs;
        for (const std::string& ps : split(get("system", "ell_pieces"), '|')) {
            const auto fields = split(ps, ':');
            if (fields.size() != 3) throw ConfigError("ell_pieces: expected t0:t1:coeffs");
            segs.push_back({std::stod(fields[0]), std::stod(fields[1]),
                            Polynomial(parse_numbers(fields[2], ','))});
        }
        ell = Loading::piecewise(std::move(segs));
    } else {
        throw ConfigError("unknown ell kind: " + lkind);
    }

    const Dissipation psi(get_double("system", "alpha_plus"),
                          get_double("system", "alpha_minus"));

    ViscousCorrection delta = ViscousCorrection::none();
    const std::string dkind = get_or("system", "delta", "none");
    if (dkind == "none") {
        delta = ViscousCorrection::none();
    } else if (dkind == "quadratic") {
        delta = ViscousCorrection::quadratic(get_double("system", "mu"));
    } else if (dkind == "convex_of_psi") {
        delta = ViscousCorrection::convex_of_psi(get_double("system", "f_coefficient"),
                                                 get_double("system", "f_exponent"));
    } else {
        throw ConfigError("unknown delta kind: " + dkind);
    }

    return RISystem(std::move(W), std::move(ell), psi, delta);
}

} // namespace riveq
