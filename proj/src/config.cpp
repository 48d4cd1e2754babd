#include "ckns/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ckns {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    ini.text_ = text;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error("config line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            ini.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
        ini.sections_[section][key] = val;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse(os.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

bool IniFile::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::string IniFile::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) throw Error("config: missing section [" + section + "]");
    auto jt = it->second.find(key);
    if (jt == it->second.end())
        throw Error("config: missing key '" + key + "' in section [" + section + "]");
    return jt->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error("config: key '" + key + "' in [" + section + "] is not a number: " + v);
    }
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int IniFile::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? int(get_double(section, key)) : fallback;
}

Vec3 IniFile::get_vec3_or(const std::string& section, const std::string& key,
                          const Vec3& fallback) const {
    if (!has(section, key)) return fallback;
    std::istringstream is(get(section, key));
    Vec3 v;
    if (!(is >> v[0] >> v[1] >> v[2]))
        throw Error("config: key '" + key + "' in [" + section + "] needs three numbers");
    return v;
}

SimulationSetup parse_simulation_config(const std::string& path) {
    IniFile ini = IniFile::parse_file(path);
    SimulationSetup setup;
    setup.config_echo = ini.text();

    if (!ini.has_section("grid")) throw Error("config: missing section [grid]");
    if (!ini.has_section("time")) throw Error("config: missing section [time]");
    if (!ini.has_section("initial")) throw Error("config: missing section [initial]");

    const int n = ini.get_int_or("grid", "n", 0);
    const int nx = ini.get_int_or("grid", "nx", n);
    const int ny = ini.get_int_or("grid", "ny", n);
    const int nz = ini.get_int_or("grid", "nz", n);
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw Error("config: [grid] needs n (or nx/ny/nz) to be positive");
    setup.solver.grid = Grid(nx, ny, nz, ini.get_double("grid", "L"));

    setup.solver.t_start = ini.get_double("time", "t_start");
    setup.solver.t_end = ini.get_double("time", "t_end");
    const std::string dt = ini.get_or("time", "dt", "auto");
    setup.solver.dt = (dt == "auto") ? 0.0 : ini.get_double("time", "dt");
    setup.solver.dt_max = ini.get_double_or("time", "dt_max", 0.05);
    setup.solver.cfl_number = ini.get_double_or("time", "cfl", 0.4);

    if (ini.has("initial", "snapshot")) {
        setup.initial_snapshot = ini.get("initial", "snapshot");
    } else {
        setup.preset.name = ini.get("initial", "preset");
        setup.preset.n0 = ini.get_double_or("initial", "n0", 0.0);
        setup.preset.c0 = ini.get_double_or("initial", "c0", 1.0);
        setup.preset.amplitude = ini.get_double_or("initial", "amplitude", 0.0);
        setup.preset.mode = ini.get_int_or("initial", "mode", 1);
        setup.preset.sigma = ini.get_double_or("initial", "sigma", 0.1);
        setup.preset.center = ini.get_vec3_or("initial", "center", setup.preset.center);
        setup.preset.seed = std::uint64_t(ini.get_int_or("initial", "seed", 0));
        setup.seed = setup.preset.seed;
    }

    setup.solver.gradphi.constant = ini.get_vec3_or("forcing", "gradphi", {0, 0, 0});

    setup.solver.output_stride = ini.get_int_or("output", "stride", 1);
    setup.solver.dense_output_from = ini.get_double_or("output", "dense_from", 1.0);
    setup.solver.dense_output_stride = ini.get_int_or("output", "dense_stride", 1);

    const std::string pos = ini.get_or("initial", "positivity", "clip");
    if (pos == "clip")
        setup.solver.positivity = SolverConfig::Positivity::Clip;
    else if (pos == "reject")
        setup.solver.positivity = SolverConfig::Positivity::Reject;
    else
        throw Error("config: positivity must be clip or reject, got " + pos);
    setup.solver.dealias = ini.get_or("initial", "dealias", "on") != "off";

    setup.solver.validate();
    return setup;
}

} // namespace ckns
