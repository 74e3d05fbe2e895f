#pragma once

// Run configuration shared by the command-line tool and the bindings.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "algnov/specseq.hpp"

namespace algnov {

using ConfigValue = std::variant<long long, bool, std::string, std::vector<std::string>>;

/// Flat key = value documents in TOML syntax: integers, booleans, basic
/// strings and arrays of strings, with # comments.  Tables and other value
/// types throw InvalidArgument naming the line.
std::map<std::string, ConfigValue> parse_toml_subset(const std::string& text);

struct RunConfig {
    std::string suite;  ///< fast, extended, full or empty
    unsigned prime = 2;
    unsigned stem_max = 20;
    unsigned s_max = 10;
    std::optional<unsigned> i_max, r_max, precision;
    unsigned t_max = 16;  ///< structure-map and cobar dumps only
    std::string out = "algnov-out";
    std::vector<std::string> formats = {"svg", "tsv"};
    unsigned threads = 1;
    bool force = false;
    std::uint64_t basis_cap = 3'000'000;

    /// Window with the automatic defaults filled in.
    NovikovWindow window() const;
    /// Every resolved field as key=value pairs in a fixed order.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Window presets: fast (stems <= 20), extended (stems <= 38) and full (the
/// whole table, stems <= 41).
RunConfig suite_config(const std::string& name);

/// Applies a parsed config file on top of cfg.  Unknown keys and wrong types
/// throw InvalidArgument.
void apply_config(RunConfig& cfg, const std::map<std::string, ConfigValue>& values);

}  // namespace algnov
