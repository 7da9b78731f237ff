#include "cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "disaster/errors.hpp"

namespace cli {

namespace {

std::string flag_of(const std::string& key) {
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

double parse_number(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e) throw UsageError(flag_of(key) + ": not a number: '" + v + "'");
    return out;
}

std::string json_scalar(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
    if (j.is_number_float()) return format_number(j.get<double>());
    throw UsageError("config values must be scalars");
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    return j;
}

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string env_name(const std::string& key) {
    std::string out = "DISASTER_";
    for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void Settings::set(const std::string& key, std::string value, std::string source, Kind kind) {
    entries_[key] = Entry{std::move(value), std::move(source), kind};
}

const Settings::Entry& Settings::at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw UsageError(flag_of(key) + " is required");
    return it->second;
}

double Settings::number(const std::string& key) const { return parse_number(key, at(key).value); }

std::optional<double> Settings::maybe_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
}

std::uint64_t Settings::count(const std::string& key) const {
    double v = number(key);
    if (!(v >= 0) || v != std::floor(v) || v > 1.8e19) throw UsageError(flag_of(key) + ": expected a count");
    return static_cast<std::uint64_t>(v);
}

std::string Settings::text(const std::string& key) const { return at(key).value; }

bool Settings::flag(const std::string& key) const {
    if (!has(key)) return false;
    const std::string& v = at(key).value;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UsageError(flag_of(key) + ": expected true or false");
}

Json Settings::to_json() const {
    Json out = Json::object();
    for (const auto& [k, e] : entries_) {
        Json v;
        switch (e.kind) {
            case Kind::Number: v = parse_number(k, e.value); break;
            case Kind::Count: v = count(k); break;
            case Kind::Flag: v = flag(k); break;
            case Kind::Text: v = e.value; break;
        }
        out[k] = {{"value", v}, {"source", e.source}};
    }
    return out;
}

Settings Settings::resolve(const std::vector<OptionDef>& defs, const std::map<std::string, std::string>& flags) {
    std::optional<std::string> config_path;
    if (auto it = flags.find("config"); it != flags.end())
        config_path = it->second;
    else if (const char* e = std::getenv("DISASTER_CONFIG"))
        config_path = e;
    Json config = config_path ? load_config(*config_path) : Json::object();

    Settings s;
    for (const auto& d : defs) {
        if (d.key == "config") continue;
        if (auto it = flags.find(d.key); it != flags.end()) {
            s.set(d.key, it->second, "flag", d.kind);
        } else if (const char* e = std::getenv(env_name(d.key).c_str())) {
            s.set(d.key, e, "env", d.kind);
        } else if (config.contains(d.key)) {
            s.set(d.key, json_scalar(config[d.key]), "config", d.kind);
        } else if (d.fallback) {
            s.set(d.key, *d.fallback, "default", d.kind);
        }
    }
    if (config_path) s.set("config", *config_path, flags.count("config") ? "flag" : "env", Kind::Text);
    // surface malformed values as usage errors before any work is done
    for (const auto& [k, e] : s.entries_) {
        if (e.kind == Kind::Number) s.number(k);
        if (e.kind == Kind::Count) s.count(k);
        if (e.kind == Kind::Flag) s.flag(k);
    }
    return s;
}

disaster::ModelSpec model_from(const Settings& s) {
    using disaster::ModelSpec;
    std::string m = s.text("model");
    if (m != "A" && m != "B" && m != "a" && m != "b") throw UsageError("--model: expected A or B");
    ModelSpec spec;
    spec.kind = (m == "A" || m == "a") ? disaster::ModelKind::A : disaster::ModelKind::B;
    spec.alpha = s.number("alpha");
    spec.beta = s.number("beta");
    spec.nu = s.maybe_number("nu");
    spec.p0 = s.number("p0");
    if (auto lambda = s.maybe_number("lambda")) spec.ct = disaster::CtLayer{*lambda, s.number("r0")};
    disaster::validate(spec);
    return spec;
}

Json spec_json(const disaster::ModelSpec& spec) {
    Json j = {{"model", disaster::to_string(spec.kind)}, {"alpha", spec.alpha}, {"beta", spec.beta}};
    j["nu"] = spec.nu ? Json(*spec.nu) : Json(nullptr);
    j["p0"] = spec.p0;
    if (spec.ct) {
        j["lambda"] = spec.ct->lambda;
        j["r0"] = spec.ct->r0;
    }
    j["description"] = disaster::describe(spec);
    return j;
}

Cell cell(const std::optional<double>& v) {
    if (!v) return std::monostate{};
    return *v;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << csv_text(t.header[i]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (auto d = std::get_if<double>(&row[i])) os << format_number(*d);
            if (auto s = std::get_if<std::string>(&row[i])) os << csv_text(*s);
        }
        os << '\n';
    }
    return os.str();
}

Json delta_json(const disaster::Delta& d) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"name", d.name},           {"analytic", opt(d.analytic)},   {"oracle", opt(d.oracle)},
            {"mc_estimate", opt(d.mc_estimate)}, {"mc_stderr", opt(d.mc_stderr)}, {"tolerance", d.tolerance},
            {"rule", d.rule},           {"pass", d.pass},                {"gating", d.gating}};
}

std::string utc_stamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

Artifacts write_artifacts(const std::string& dir, const std::string& base, const std::string& command,
                          const Result& r, const Settings& s, const std::vector<std::string>& argv,
                          const std::optional<std::string>& stamp, double wall_seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Artifacts a;
    Json j;
    j["command"] = command;
    j["version"] = DISASTER_VERSION;
    j["argv"] = argv;
    j["config"] = s.to_json();
    if (r.spec) j["spec"] = spec_json(*r.spec);
    if (r.table) {
        a.csv = (fs::path(dir) / (base + ".csv")).string();
        std::ofstream(a.csv) << to_csv(*r.table);
        j["csv"] = base + ".csv";
        j["columns"] = r.table->header;
        j["rows"] = r.table->rows.size();
    }
    j["summary"] = r.summary;
    Json deltas = Json::array();
    for (const auto& d : r.deltas) deltas.push_back(delta_json(d));
    j["oracle_deltas"] = deltas;
    j["status"] = r.status;
    if (stamp) {
        j["timestamp"] = *stamp;
        j["wall_time"] = wall_seconds;
    }
    a.json = (fs::path(dir) / (base + ".json")).string();
    std::ofstream(a.json) << j.dump(2) << '\n';
    return a;
}

}  // namespace cli
