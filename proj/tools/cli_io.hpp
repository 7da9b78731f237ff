#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "disaster/model.hpp"
#include "disaster/verify.hpp"

namespace cli {

using Json = nlohmann::ordered_json;

// Bad flag values or combinations; reported with usage text, exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { Number, Count, Text, Flag };

struct OptionDef {
    std::string key;  // flag is --key with '_' replaced by '-'
    Kind kind;
    std::string help;
    std::optional<std::string> fallback;
};

// Effective configuration: flag > DISASTER_<KEY> environment variable > config file > default.
class Settings {
public:
    struct Entry {
        std::string value;
        std::string source;
        Kind kind;
    };

    void set(const std::string& key, std::string value, std::string source, Kind kind);
    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    double number(const std::string& key) const;
    std::optional<double> maybe_number(const std::string& key) const;
    std::uint64_t count(const std::string& key) const;
    std::string text(const std::string& key) const;
    bool flag(const std::string& key) const;
    Json to_json() const;

    // Resolve `defs` from flag values (present only if given), env and config.
    static Settings resolve(const std::vector<OptionDef>& defs, const std::map<std::string, std::string>& flags);

private:
    const Entry& at(const std::string& key) const;
    std::map<std::string, Entry> entries_;
};

std::string env_name(const std::string& key);

// Builds and validates the model from model/alpha/beta/nu/p0/lambda/r0.
disaster::ModelSpec model_from(const Settings& s);
Json spec_json(const disaster::ModelSpec& spec);

using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
    std::vector<std::string> header;  // header[0] names the index column
    std::vector<std::vector<Cell>> rows;
};

Cell cell(const std::optional<double>& v);
std::string format_number(double v);
std::string to_csv(const Table& t);

struct Result {
    std::optional<Table> table;
    Json summary = Json::object();
    std::vector<disaster::Delta> deltas;
    std::string text;
    std::optional<disaster::ModelSpec> spec;
    int status = 0;
};

struct Artifacts {
    std::string csv;
    std::string json;
};

// Writes <dir>/<base>.csv (if there is a table) and <dir>/<base>.json.
// `stamp` is null for deterministic output: no timestamp or wall time is recorded.
Artifacts write_artifacts(const std::string& dir, const std::string& base, const std::string& command,
                          const Result& r, const Settings& s, const std::vector<std::string>& argv,
                          const std::optional<std::string>& stamp, double wall_seconds);

std::string utc_stamp();

Json delta_json(const disaster::Delta& d);

}  // namespace cli
