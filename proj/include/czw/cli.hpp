#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "czw/grid.hpp"

namespace czw {

// One `key = value` line; keys inside a [section] are stored as "section.key".
struct ConfigEntry {
    std::string value;
    int line = 0;
    int column = 0;  // 1-based column where the value starts
};

struct ConfigFile {
    std::string source;  // file name used in messages
    std::map<std::string, ConfigEntry> entries;

    static ConfigFile parse(const std::string& text, const std::string& source = "<config>");
    static ConfigFile load(const std::string& path);
    const ConfigEntry* find(const std::string& key) const;
};

struct ParamDoc {
    std::string key;
    std::string fallback;  // default value as it would appear in a config
    std::string doc;
};

const std::vector<std::string>& experiment_names();
// Keys accepted by an experiment besides experiment, seed and output.
const std::vector<ParamDoc>& experiment_params(const std::string& name);

// Typed view of a config for one experiment. Unknown keys are rejected on
// construction; every accessor falls back to the documented default.
class ExperimentConfig {
public:
    ExperimentConfig(ConfigFile file, std::optional<std::uint64_t> seed_override = std::nullopt);

    const std::string& experiment() const { return name_; }
    std::uint64_t seed() const { return seed_; }
    std::string output() const;

    double number(const std::string& key, double lo = -INFINITY, double hi = INFINITY) const;
    int integer(const std::string& key, int lo, int hi) const;
    bool flag(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    // Expression DSL, or probe(seed[, lo, hi, width, center]) / bumps(seed, lo, hi[, count]).
    SampledFunction function(const std::string& key, const Grid& g) const;

    // Resolved value of every documented key, in documentation order.
    nlohmann::ordered_json resolved() const;

    // ConfigError naming the key and line.
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    std::string raw(const std::string& key) const;
    ConfigFile file_;
    std::string name_;
    std::uint64_t seed_ = 0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0;
    double threshold = 0;
    std::string relation;  // how value compares with threshold, e.g. "<"
};

struct ExperimentOutput {
    nlohmann::ordered_json report;
    std::vector<CheckResult> checks;
    bool passed() const;
};

// Runs the configured experiment, writing CSVs into out_dir (which must exist).
ExperimentOutput run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

struct RunOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

// Loads, runs and writes report.json. Exit code 0 when every check passes,
// 1 on a failed check or runtime error, 2 on a configuration error.
int run_config(const RunOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace czw
