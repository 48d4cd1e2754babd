#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ckns/solver.hpp"

namespace ckns {

/// Minimal INI reader: [section] headers, key = value lines, # or ; comments.
class IniFile {
  public:
    static IniFile parse(const std::string& text);
    static IniFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    Vec3 get_vec3_or(const std::string& section, const std::string& key, const Vec3& fallback) const;

    const std::string& text() const { return text_; }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string text_;
};

/// Everything `simulate` needs, decoded from one config file.
struct SimulationSetup {
    SolverConfig solver;
    PresetParams preset;
    std::string initial_snapshot; // non-empty: load instead of sampling a preset
    std::uint64_t seed = 0;
    std::string config_echo;
};

/// Required sections: [grid], [time], [initial]. Missing pieces name the
/// offending section/key in the thrown diagnostic.
SimulationSetup parse_simulation_config(const std::string& path);

} // namespace ckns
