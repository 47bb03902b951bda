#include "frontlab/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "frontlab/rng.hpp"

namespace frontlab {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::string schema_name, std::vector<std::string> columns)
    : schema_(std::move(schema_name)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += format_double(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvTable::add_row_raw(const std::vector<std::string>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += values[i];
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::serialize() const {
    std::string out = "# schema=" + schema_ + " schema_version=" +
                      std::to_string(kCsvSchemaVersion) + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a_checksum(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config"] = config_echo;
    j["code_version"] = code_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["replica_seeds"] = replica_seeds;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [file, sum] : outputs) {
        outs.push_back({{"file", file}, {"checksum", sum}});
    }
    j["outputs"] = outs;
    return j;
}

namespace {

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc;
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

RunManifest run_experiment(const std::string& name, const Config& config, const RunContext& ctx) {
    const auto& registry = experiment_registry();
    auto it = registry.find(name);
    if (it == registry.end()) throw ConfigError("unknown experiment '" + name + "'");
    const Experiment& exp = it->second;

    Params params(exp.schema, config.section(name));

    RunManifest manifest;
    manifest.experiment = name;
    manifest.code_version = kCodeVersion;
    manifest.started_at = timestamp_now();
    for (const auto& [k, v] : params.raw()) manifest.config_echo["params"][k] = v;
    manifest.config_echo["seed"] = ctx.seed;
    manifest.config_echo["replicas"] = ctx.replicas;
    manifest.config_echo["workers"] = ctx.workers;
    manifest.config_echo["format"] = ctx.format;
    const std::uint64_t seeds_to_list = std::min<std::uint64_t>(ctx.replicas, 10000);
    for (std::uint64_t r = 0; r < seeds_to_list; ++r)
        manifest.replica_seeds.push_back(derive_seed(ctx.seed, r));

    ExperimentResult result = exp.run(params, ctx);

    // every summary echoes what is needed to reproduce it
    result.summary["schema_version"] = kCsvSchemaVersion;
    result.summary["experiment"] = name;
    result.summary["seed"] = ctx.seed;
    result.summary["replicas"] = ctx.replicas;
    result.summary["workers"] = ctx.workers;
    for (const auto& [k, v] : params.raw()) result.summary["params"][k] = v;

    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + ctx.out_dir);

    const bool want_csv = ctx.format == "csv" || ctx.format == "both";
    const bool want_json = ctx.format == "json" || ctx.format == "both";
    if (want_csv) {
        for (const auto& [stem, table] : result.tables) {
            const std::string path = ctx.out_dir + "/" + name + "." + stem + ".csv";
            const std::string content = table.serialize();
            write_atomic(path, content);
            manifest.outputs.emplace_back(path, fnv1a_checksum(content));
        }
    }
    if (want_json) {
        const std::string path = ctx.out_dir + "/" + name + ".summary.json";
        const std::string content = result.summary.dump(2) + "\n";
        write_atomic(path, content);
        manifest.outputs.emplace_back(path, fnv1a_checksum(content));
    }
    manifest.finished_at = timestamp_now();
    write_atomic(ctx.out_dir + "/" + name + ".manifest.json", manifest.to_json().dump(2) + "\n");
    return manifest;
}

}  // namespace frontlab
