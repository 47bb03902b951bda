#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// INI-style configuration: named [section] per experiment, key = value lines,
// '#' comments. Unknown keys are hard errors at binding time.
class Config {
  public:
    static Config parse_string(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has_section(const std::string& name) const;
    const std::map<std::string, std::string>& section(const std::string& name) const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct ParamSpec {
    enum class Type { Int, Real, Str, Bool };
    std::string name;
    Type type;
    std::string default_value;
};

// Typed parameter view for one experiment: defaults overlaid with the
// experiment's config section; every key is validated against the schema.
class Params {
  public:
    Params(const std::vector<ParamSpec>& schema, const std::map<std::string, std::string>& values);

    std::int64_t get_int(const std::string& name) const;
    double get_real(const std::string& name) const;
    std::string get_str(const std::string& name) const;
    bool get_bool(const std::string& name) const;

    const std::map<std::string, std::string>& raw() const { return kv_; }

  private:
    const ParamSpec& spec(const std::string& name) const;

    std::vector<ParamSpec> schema_;
    std::map<std::string, std::string> kv_;
};

}  // namespace frontlab
