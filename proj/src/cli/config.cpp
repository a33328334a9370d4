#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "czw/cli.hpp"
#include "czw/expression.hpp"
#include "czw/probes.hpp"

namespace czw {
namespace {

const std::set<std::string> kGlobalKeys{"experiment", "seed", "output"};

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    if (lead) *lead = a;
    return s.substr(a, b - a);
}

bool identifier(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

[[noreturn]] void syntax(const std::string& source, int line, int column, const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
}

bool parse_double(const std::string& s, double& out) {
    std::string t = trim(s);
    if (t == "inf" || t == "+inf") return out = INFINITY, true;
    if (t == "-inf") return out = -INFINITY, true;
    const char* end = t.data() + t.size();
    auto r = std::from_chars(t.data(), end, out);
    return r.ec == std::errc() && r.ptr == end && !t.empty();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
    ConfigFile cfg;
    cfg.source = source;
    std::istringstream is(text);
    std::string line, section;
    for (int no = 1; std::getline(is, line); ++no) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::size_t lead = 0;
        std::string body = trim(line, &lead);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') syntax(source, no, int(lead + body.size()), "expected ']' to close the section header");
            section = trim(body.substr(1, body.size() - 2));
            if (!identifier(section)) syntax(source, no, int(lead + 2), "invalid section name '" + section + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) syntax(source, no, int(lead + 1), "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (!identifier(key)) syntax(source, no, int(lead + 1), "invalid key '" + key + "'");
        std::size_t vlead = 0;
        std::string value = trim(line.substr(eq + 1), &vlead);
        if (value.empty()) syntax(source, no, int(eq + 2), "missing value for '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries.count(full))
            syntax(source, no, int(lead + 1),
                   "duplicate key '" + full + "' (first set on line " + std::to_string(cfg.entries[full].line) + ")");
        cfg.entries[full] = {value, no, int(eq + 2 + vlead)};
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
}

const ConfigEntry* ConfigFile::find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

ExperimentConfig::ExperimentConfig(ConfigFile file, std::optional<std::uint64_t> seed_override)
    : file_(std::move(file)) {
    auto where = [&](const std::string& key) {
        return file_.source + ":" + std::to_string(file_.entries.at(key).line);
    };
    for (const auto& [key, e] : file_.entries)
        if (key.find('.') == std::string::npos && !kGlobalKeys.count(key))
            throw ConfigError(where(key) + ": unknown key '" + key + "'");
    const ConfigEntry* exp = file_.find("experiment");
    if (!exp) throw ConfigError(file_.source + ": missing key 'experiment'");
    name_ = exp->value;
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name_) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError(where("experiment") + ": unknown experiment '" + name_ + "' (expected one of " + list + ")");
    }
    const auto& params = experiment_params(name_);
    for (const auto& [key, e] : file_.entries) {
        if (kGlobalKeys.count(key)) continue;
        bool known = std::any_of(params.begin(), params.end(), [&](const ParamDoc& p) { return p.key == key; });
        if (!known) throw ConfigError(where(key) + ": unknown key '" + key + "' for experiment '" + name_ + "'");
    }
    if (seed_override) {
        seed_ = *seed_override;
    } else if (const ConfigEntry* s = file_.find("seed")) {
        double v;
        if (!parse_double(s->value, v) || v < 0 || v != std::floor(v) || v > 9.0e15)
            fail("seed", "expected a nonnegative integer, got '" + s->value + "'");
        seed_ = std::uint64_t(v);
    } else {
        seed_ = 1;
    }
}

std::string ExperimentConfig::output() const {
    const ConfigEntry* e = file_.find("output");
    return e ? e->value : "out/" + name_;
}

void ExperimentConfig::fail(const std::string& key, const std::string& message) const {
    const ConfigEntry* e = file_.find(key);
    std::string where = file_.source + (e ? ":" + std::to_string(e->line) : "");
    throw ConfigError(where + ": " + key + ": " + message);
}

std::string ExperimentConfig::raw(const std::string& key) const {
    if (const ConfigEntry* e = file_.find(key)) return e->value;
    for (const auto& p : experiment_params(name_))
        if (p.key == key) return p.fallback;
    throw Error("ExperimentConfig: undocumented key '" + key + "'");
}

double ExperimentConfig::number(const std::string& key, double lo, double hi) const {
    std::string s = raw(key);
    double v;
    if (!parse_double(s, v)) fail(key, "expected a number, got '" + s + "'");
    if (!(v >= lo && v <= hi)) {
        std::ostringstream os;
        os << "value " << s << " outside [" << lo << ", " << hi << "]";
        fail(key, os.str());
    }
    return v;
}

int ExperimentConfig::integer(const std::string& key, int lo, int hi) const {
    double v = number(key, lo, hi);
    if (v != std::floor(v)) fail(key, "expected an integer, got '" + raw(key) + "'");
    return int(v);
}

bool ExperimentConfig::flag(const std::string& key) const {
    std::string s = raw(key);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    fail(key, "expected true or false, got '" + s + "'");
}

std::string ExperimentConfig::text(const std::string& key) const { return raw(key); }

std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split(raw(key), ',')) {
        double v;
        if (!parse_double(part, v)) fail(key, "expected a comma-separated list of numbers, got '" + raw(key) + "'");
        out.push_back(v);
    }
    if (out.empty()) fail(key, "empty list");
    return out;
}

SampledFunction ExperimentConfig::function(const std::string& key, const Grid& g) const {
    std::string s = raw(key);
    auto call = [&](const std::string& name, std::size_t min_args, std::size_t max_args) {
        std::string inner = trim(s.substr(name.size() + 1));
        if (inner.empty() || inner.back() != ')') fail(key, name + "(...) is missing ')'");
        std::vector<double> args;
        for (const auto& part : split(inner.substr(0, inner.size() - 1), ',')) {
            double v;
            if (!parse_double(part, v)) fail(key, "bad " + name + " argument '" + part + "'");
            args.push_back(v);
        }
        if (args.size() < min_args || args.size() > max_args)
            fail(key, name + " takes " + std::to_string(min_args) + " to " + std::to_string(max_args) + " arguments");
        if (args[0] < 0 || args[0] != std::floor(args[0])) fail(key, name + " seed must be a nonnegative integer");
        return args;
    };
    try {
        if (s.rfind("probe(", 0) == 0) {
            auto a = call("probe", 1, 5);
            a.resize(5, NAN);
            return band_limited_probe(g, std::uint64_t(a[0]), std::isnan(a[1]) ? 11.0 : a[1],
                                      std::isnan(a[2]) ? 37.0 : a[2], std::isnan(a[3]) ? 1.5 : a[3],
                                      std::isnan(a[4]) ? 0.0 : a[4]);
        }
        if (s.rfind("bumps(", 0) == 0) {
            auto a = call("bumps", 3, 4);
            return bump_cluster(g, std::uint64_t(a[0]), a[1], a[2], a.size() > 3 ? int(a[3]) : 3);
        }
        return sample(parse_expression(s, g.d).field(), g);
    } catch (const ParseError& e) {
        const ConfigEntry* entry = file_.find(key);
        std::string where = file_.source;
        if (entry) where += ":" + std::to_string(entry->line) + ":" + std::to_string(entry->column + e.column() - 1);
        throw ConfigError(where + ": " + key + ": " + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(key, e.what());
    }
}

nlohmann::ordered_json ExperimentConfig::resolved() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& p : experiment_params(name_)) out[p.key] = raw(p.key);
    return out;
}

}  // namespace czw
