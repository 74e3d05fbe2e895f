#include "algnov/config.hpp"

#include <algorithm>
#include <sstream>

namespace algnov {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s)
{
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"' && (k == 0 || s[k - 1] != '\\'))
            quoted = !quoted;
        else if (s[k] == '#' && !quoted)
            return s.substr(0, k);
    }
    return s;
}

std::string parse_string(const std::string& v, const std::string& where)
{
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        throw InvalidArgument(where + ": expected a quoted string");
    std::string out;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        if (v[k] != '\\') {
            if (v[k] == '"')
                throw InvalidArgument(where + ": unescaped quote");
            out += v[k];
            continue;
        }
        if (++k + 1 >= v.size())
            throw InvalidArgument(where + ": dangling escape");
        switch (v[k]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: throw InvalidArgument(where + ": unsupported escape");
        }
    }
    return out;
}

ConfigValue parse_value(const std::string& v, const std::string& where)
{
    if (v.empty())
        throw InvalidArgument(where + ": missing value");
    if (v == "true" || v == "false")
        return v == "true";
    if (v.front() == '"')
        return parse_string(v, where);
    if (v.front() == '[') {
        if (v.back() != ']')
            throw InvalidArgument(where + ": unterminated array");
        std::vector<std::string> items;
        const std::string body = trim(v.substr(1, v.size() - 2));
        std::size_t k = 0;
        while (k < body.size()) {
            auto close = body.find('"', k + 1);
            while (close != std::string::npos && body[close - 1] == '\\')
                close = body.find('"', close + 1);
            if (body[k] != '"' || close == std::string::npos)
                throw InvalidArgument(where + ": arrays hold quoted strings only");
            items.push_back(parse_string(body.substr(k, close - k + 1), where));
            k = body.find_first_not_of(" \t", close + 1);
            if (k == std::string::npos)
                break;
            if (body[k] != ',')
                throw InvalidArgument(where + ": expected ',' in array");
            k = body.find_first_not_of(" \t", k + 1);
            if (k == std::string::npos)
                break;  // trailing comma
        }
        return items;
    }
    std::string digits = v;
    digits.erase(std::remove(digits.begin(), digits.end(), '_'), digits.end());
    std::size_t used = 0;
    long long n = 0;
    try {
        n = std::stoll(digits, &used, 10);
    }
    catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != digits.size())
        throw InvalidArgument(where + ": unsupported value '" + v + "'");
    return n;
}

unsigned as_unsigned(const ConfigValue& v, const std::string& key)
{
    const auto* n = std::get_if<long long>(&v);
    if (!n || *n < 0 || *n > 1'000'000)
        throw InvalidArgument("config: " + key + " must be a small non-negative integer");
    return static_cast<unsigned>(*n);
}

}  // namespace

std::map<std::string, ConfigValue> parse_toml_subset(const std::string& text)
{
    std::map<std::string, ConfigValue> out;
    std::istringstream is(text);
    std::string raw;
    for (unsigned lineno = 1; std::getline(is, raw); ++lineno) {
        const std::string where = "config line " + std::to_string(lineno);
        const std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[')
            throw InvalidArgument(where + ": tables are not supported");
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                               std::string::npos)
            throw InvalidArgument(where + ": bad key '" + key + "'");
        if (out.count(key))
            throw InvalidArgument(where + ": duplicate key '" + key + "'");
        out.emplace(key, parse_value(trim(line.substr(eq + 1)), where));
    }
    return out;
}

NovikovWindow RunConfig::window() const
{
    return NovikovWindow::make(prime, stem_max, s_max, i_max, r_max, precision);
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const
{
    const NovikovWindow w = window();
    std::string fmt;
    for (const auto& f : formats)
        fmt += (fmt.empty() ? "" : ",") + f;
    return {
        {"suite", suite.empty() ? "custom" : suite},
        {"prime", std::to_string(w.p)},
        {"stem_max", std::to_string(w.stem_max)},
        {"s_max", std::to_string(w.s_max)},
        {"i_max", std::to_string(w.i_max)},
        {"r_max", std::to_string(w.r_max)},
        {"precision", std::to_string(w.K) + (precision ? "" : " (auto: i_max + r_max + 4)")},
        {"t_max", std::to_string(w.t_max)},
        {"formats", fmt},
        {"basis_cap", std::to_string(basis_cap)},
    };
}

RunConfig suite_config(const std::string& name)
{
    RunConfig c;
    c.suite = name;
    if (name == "fast") {
        c.stem_max = 20, c.s_max = 10, c.i_max = 14, c.r_max = 5;
    } else if (name == "extended") {
        c.stem_max = 38, c.s_max = 3, c.i_max = 6, c.r_max = 3;
    } else if (name == "full") {
        c.stem_max = 41, c.s_max = 5, c.i_max = 6, c.r_max = 3;
    } else {
        throw InvalidArgument("unknown suite '" + name + "' (expected fast, extended or full)");
    }
    return c;
}

void apply_config(RunConfig& cfg, const std::map<std::string, ConfigValue>& values)
{
    if (auto it = values.find("suite"); it != values.end()) {
        const auto* s = std::get_if<std::string>(&it->second);
        if (!s)
            throw InvalidArgument("config: suite must be a string");
        const RunConfig preset = suite_config(*s);
        cfg.suite = preset.suite;
        cfg.stem_max = preset.stem_max, cfg.s_max = preset.s_max;
        cfg.i_max = preset.i_max, cfg.r_max = preset.r_max;
    }
    for (const auto& [key, v] : values) {
        if (key == "suite")
            continue;
        if (key == "prime")
            cfg.prime = as_unsigned(v, key);
        else if (key == "stem_max")
            cfg.stem_max = as_unsigned(v, key);
        else if (key == "s_max")
            cfg.s_max = as_unsigned(v, key);
        else if (key == "i_max")
            cfg.i_max = as_unsigned(v, key);
        else if (key == "r_max")
            cfg.r_max = as_unsigned(v, key);
        else if (key == "precision")
            cfg.precision = as_unsigned(v, key);
        else if (key == "tmax")
            cfg.t_max = as_unsigned(v, key);
        else if (key == "threads")
            cfg.threads = std::max(1u, as_unsigned(v, key));
        else if (key == "basis_cap") {
            const auto* n = std::get_if<long long>(&v);
            if (!n || *n < 0)
                throw InvalidArgument("config: basis_cap must be a non-negative integer");
            cfg.basis_cap = static_cast<std::uint64_t>(*n);
        }
        else if (key == "out") {
            const auto* s = std::get_if<std::string>(&v);
            if (!s)
                throw InvalidArgument("config: out must be a string");
            cfg.out = *s;
        } else if (key == "formats") {
            const auto* s = std::get_if<std::vector<std::string>>(&v);
            if (!s)
                throw InvalidArgument("config: formats must be an array of strings");
            cfg.formats = *s;
        } else if (key == "force") {
            const auto* b = std::get_if<bool>(&v);
            if (!b)
                throw InvalidArgument("config: force must be a boolean");
            cfg.force = *b;
        } else {
            throw InvalidArgument("config: unknown key '" + key + "'");
        }
    }
}

}  // namespace algnov
