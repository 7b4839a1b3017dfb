#include "qslink/config_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qslink/errors.hpp"

namespace qslink {

namespace {

enum class Unit { none, length, time };

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& what) {
    if (line > 0)
        throw config_error("config line " + std::to_string(line) + ": " + what);
    throw config_error("override: " + what);
}

double unit_factor(const std::string& suffix, Unit unit, int line) {
    if (unit == Unit::length) {
        if (suffix == "km") return 1e3;
        if (suffix == "m") return 1.0;
        if (suffix == "cm") return 1e-2;
        if (suffix == "mm") return 1e-3;
        if (suffix == "um") return 1e-6;
        if (suffix == "nm") return 1e-9;
    } else if (unit == Unit::time) {
        if (suffix == "s") return 1.0;
        if (suffix == "ms") return 1e-3;
        if (suffix == "us") return 1e-6;
        if (suffix == "ns") return 1e-9;
        if (suffix == "ps") return 1e-12;
    }
    fail(line, "unknown unit suffix '" + suffix + "'");
}

double parse_real(const std::string& raw, Unit unit, int line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || errno == ERANGE) fail(line, "malformed number '" + raw + "'");
    const std::string suffix = trim(std::string(end));
    if (suffix.empty()) return v;
    if (unit == Unit::none) fail(line, "value '" + raw + "' does not take a unit");
    return v * unit_factor(suffix, unit, line);
}

long parse_int(const std::string& raw, int line) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
        fail(line, "malformed integer '" + raw + "'");
    return v;
}

bool parse_bool(const std::string& raw, int line) {
    if (raw == "true" || raw == "1" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "off") return false;
    fail(line, "malformed boolean '" + raw + "'");
}

void set_field(SystemConfig& cfg, const std::string& key, const std::string& val, int line) {
    auto len = [&] { return parse_real(val, Unit::length, line); };
    auto tim = [&] { return parse_real(val, Unit::time, line); };
    auto dbl = [&] { return parse_real(val, Unit::none, line); };
    auto itg = [&] { return static_cast<int>(parse_int(val, line)); };

    if (key == "L_tar") cfg.L_tar = len();
    else if (key == "lambda") cfg.lambda = len();
    else if (key == "w_z") cfg.w_z = len();
    else if (key == "r_ap") cfg.r_ap = len();
    else if (key == "A_ar") cfg.A_ar = dbl();
    else if (key == "N_arx") cfg.N_arx = itg();
    else if (key == "N_ary") cfg.N_ary = itg();
    else if (key == "d_ar") cfg.d_ar = len();
    else if (key == "N_grx") cfg.N_grx = itg();
    else if (key == "N_gry") cfg.N_gry = itg();
    else if (key == "d_gr") cfg.d_gr = len();
    else if (key == "sigma_p") cfg.sigma_p = len();
    else if (key == "alpha") cfg.alpha = dbl();
    else if (key == "beta") cfg.beta = dbl();
    else if (key == "h_La") cfg.h_La = dbl();
    else if (key == "sigma_atm") cfg.sigma_atm = dbl();
    else if (key == "h_Lc") cfg.h_Lc = dbl();
    else if (key == "eta_spad") cfg.eta_spad = dbl();
    else if (key == "sigma_spad") cfg.sigma_spad = tim();
    else if (key == "t_qb") cfg.t_qb = tim();
    else if (key == "t_aq") cfg.t_aq = tim();
    else if (key == "t_j") cfg.t_j = tim();
    else if (key == "mu_t") cfg.mu_t = dbl();
    else if (key == "mu_bg") cfg.mu_bg = dbl();
    else if (key == "P_pol") cfg.P_pol = dbl();
    else if (key == "N_s_min") cfg.N_s_min = itg();
    else if (key == "m") cfg.m = dbl();
    else if (key == "C_n2") cfg.C_n2 = dbl();
    else if (key == "speed_of_light") cfg.speed_of_light = dbl();
    else if (key == "pos_uncertainty") cfg.pos_uncertainty = len();
    else if (key == "n_t_min") cfg.n_t_min = itg();
    else if (key == "fading_static_across_grid") cfg.fading_static_across_grid = parse_bool(val, line);
    else fail(line, "unknown key '" + key + "'");
}

void apply_line(SystemConfig& cfg, const std::string& raw, int line) {
    std::string s = raw;
    if (const size_t hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) return;
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) fail(line, "expected 'key = value'");
    set_field(cfg, key, val, line);
}

} // namespace

SystemConfig parse_config(const std::string& text) {
    SystemConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) apply_line(cfg, raw, ++line);
    validate(cfg);
    return cfg;
}

SystemConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_override(SystemConfig& cfg, const std::string& assignment) {
    apply_line(cfg, assignment, 0);
}

} // namespace qslink
