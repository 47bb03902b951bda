#include "frontlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace frontlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            cfg.sections_[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        auto& sec = cfg.sections_[current];
        if (sec.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        sec[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool Config::has_section(const std::string& name) const { return sections_.count(name) > 0; }

const std::map<std::string, std::string>& Config::section(const std::string& name) const {
    static const std::map<std::string, std::string> empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
}

Params::Params(const std::vector<ParamSpec>& schema,
               const std::map<std::string, std::string>& values)
    : schema_(schema) {
    for (const auto& s : schema_) kv_[s.name] = s.default_value;
    for (const auto& [key, value] : values) {
        const bool known =
            std::any_of(schema_.begin(), schema_.end(), [&](const ParamSpec& s) { return s.name == key; });
        if (!known) throw ConfigError("unknown parameter '" + key + "'");
        kv_[key] = value;
    }
}

const ParamSpec& Params::spec(const std::string& name) const {
    for (const auto& s : schema_)
        if (s.name == name) return s;
    throw ConfigError("parameter '" + name + "' not in schema");
}

std::int64_t Params::get_int(const std::string& name) const {
    const auto& s = spec(name);
    if (s.type != ParamSpec::Type::Int) throw ConfigError("parameter '" + name + "' is not integer");
    try {
        return std::stoll(kv_.at(name));
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + name + "': bad integer '" + kv_.at(name) + "'");
    }
}

double Params::get_real(const std::string& name) const {
    const auto& s = spec(name);
    if (s.type != ParamSpec::Type::Real) throw ConfigError("parameter '" + name + "' is not real");
    try {
        return std::stod(kv_.at(name));
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + name + "': bad real '" + kv_.at(name) + "'");
    }
}

std::string Params::get_str(const std::string& name) const {
    const auto& s = spec(name);
    if (s.type != ParamSpec::Type::Str) throw ConfigError("parameter '" + name + "' is not string");
    return kv_.at(name);
}

bool Params::get_bool(const std::string& name) const {
    const auto& s = spec(name);
    if (s.type != ParamSpec::Type::Bool) throw ConfigError("parameter '" + name + "' is not bool");
    const std::string& v = kv_.at(name);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("parameter '" + name + "': bad bool '" + v + "'");
}

}  // namespace frontlab
