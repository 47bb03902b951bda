#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "frontlab/config.hpp"

namespace frontlab {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "frontlab 1.0.0";

struct RunContext {
    std::uint64_t seed = 1;
    std::uint64_t replicas = 1;
    int workers = 1;
    std::string out_dir = ".";
    std::string format = "both";  // csv | json | both
};

// In-memory CSV: schema-versioned header plus rows of 17-significant-digit
// floats; the writer owns all formatting so outputs are byte-stable.
class CsvTable {
  public:
    CsvTable(std::string schema_name, std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    void add_row_raw(const std::vector<std::string>& values);
    std::string serialize() const;
    const std::string& schema_name() const { return schema_; }

  private:
    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

std::string format_double(double v);

struct ExperimentResult {
    nlohmann::json summary;
    std::vector<std::pair<std::string, CsvTable>> tables;  // file stem -> table
};

using ExperimentFn = std::function<ExperimentResult(const Params&, const RunContext&)>;

struct Experiment {
    std::string name;
    std::string description;
    std::vector<ParamSpec> schema;
    ExperimentFn run;
};

const std::map<std::string, Experiment>& experiment_registry();

struct RunManifest {
    std::string experiment;
    nlohmann::json config_echo;
    std::string code_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::uint64_t> replica_seeds;
    std::vector<std::pair<std::string, std::uint64_t>> outputs;  // file -> checksum

    nlohmann::json to_json() const;
};

// Binds parameters, runs the experiment, writes data files atomically and
// returns the manifest (also written, as <experiment>.manifest.json).
RunManifest run_experiment(const std::string& name, const Config& config, const RunContext& ctx);

std::uint64_t fnv1a_checksum(const std::string& data);

}  // namespace frontlab
