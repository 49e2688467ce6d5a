#pragma once

// Run configuration for the command-line front end. A configuration is one
// flat JSON object; command-line flags are merged into it before parsing so
// that the same validation runs for files, flags and re-ingested output.

#include "basket_taylor/core_model.hpp"
#include "basket_taylor/error.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace basket_taylor::cli {

using json = nlohmann::json;

enum class Method { Taylor, TaylorClosed, McFull, McPartial, Margrabe };
enum class OutputFormat { Text, Json, Csv };

/// Schema or compatibility problem in a run configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& detail)
        : std::runtime_error(field.empty() ? detail : field + ": " + detail), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

inline std::string to_string(Method m) {
    switch (m) {
        case Method::Taylor: return "taylor";
        case Method::TaylorClosed: return "taylor-closed";
        case Method::McFull: return "mc-full";
        case Method::McPartial: return "mc-partial";
        case Method::Margrabe: return "margrabe";
    }
    return "";
}

inline std::string to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::Text: return "text";
        case OutputFormat::Json: return "json";
        case OutputFormat::Csv: return "csv";
    }
    return "";
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::Taylor, Method::TaylorClosed, Method::McFull, Method::McPartial, Method::Margrabe}) {
        if (to_string(m) == s) return m;
    }
    throw ConfigError("method", "unknown method '" + s + "' (taylor, taylor-closed, mc-full, mc-partial, margrabe)");
}

inline OutputFormat parse_output(const std::string& s) {
    for (OutputFormat f : {OutputFormat::Text, OutputFormat::Json, OutputFormat::Csv}) {
        if (to_string(f) == s) return f;
    }
    throw ConfigError("output", "unknown output format '" + s + "' (text, json, csv)");
}

inline bool is_taylor(Method m) { return m == Method::Taylor || m == Method::TaylorClosed; }
inline bool is_mc(Method m) { return m == Method::McFull || m == Method::McPartial; }

inline constexpr std::uint64_t kDefaultSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 20140101;

struct RunConfig {
    MarketModel model;
    BasketContract contract;
    Method method = Method::Taylor;
    int order = 2;
    std::optional<Eigen::VectorXd> ystar;  // empty means the risk-neutral mean
    std::uint64_t n_samples = kDefaultSamples;
    std::uint64_t seed = kDefaultSeed;
    OutputFormat output = OutputFormat::Text;
    unsigned chunks = 0;
};

namespace detail {

inline Eigen::VectorXd vector_field(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(key, "expected numbers");
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
}

inline double number_field(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    return v.get<double>();
}

inline std::uint64_t count_field(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(key, "expected a non-negative integer");
}

inline Eigen::MatrixXd corr_field(const json& j, Eigen::Index d) {
    const json& v = j.at("corr");
    if (v.is_number()) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Constant(d, d, v.get<double>());
        c.diagonal().setOnes();
        return c;
    }
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != d) {
        throw ConfigError("corr", "expected a number or a d x d array");
    }
    Eigen::MatrixXd c(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
            throw ConfigError("corr", "expected a d x d array");
        }
        for (Eigen::Index k = 0; k < d; ++k) {
            if (!row[static_cast<std::size_t>(k)].is_number()) throw ConfigError("corr", "expected numbers");
            c(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
    }
    return c;
}

}  // namespace detail

/// Keys that a configuration may carry. Result keys written by `price
/// --output json` are accepted and ignored so the output can be fed back in.
inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys{"spots", "vols",  "corr",      "rate", "maturity", "weights", "strike",
                                            "method", "order", "ystar",    "n_samples", "seed", "output", "chunks"};
    return keys;
}

inline const std::set<std::string>& result_keys() {
    static const std::set<std::string> keys{"price", "stderr", "terms", "expansion_point"};
    return keys;
}

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!config_keys().contains(key) && !result_keys().contains(key)) {
            throw ConfigError(key, "unknown configuration key");
        }
    }
    for (const char* key : {"spots", "vols", "corr", "rate", "maturity", "strike"}) {
        if (!j.contains(key)) throw ConfigError(key, "missing required field");
    }

    RunConfig cfg;
    cfg.model.spots = detail::vector_field(j, "spots");
    const Eigen::Index d = cfg.model.spots.size();
    cfg.model.vols = detail::vector_field(j, "vols");
    if (cfg.model.vols.size() != d) throw ConfigError("vols", "length differs from spots");
    cfg.model.corr = detail::corr_field(j, d);
    cfg.model.rate = detail::number_field(j, "rate");
    cfg.model.maturity = detail::number_field(j, "maturity");

    if (j.contains("weights")) {
        cfg.contract.weights = detail::vector_field(j, "weights");
    } else if (d == 2) {
        cfg.contract.weights = Eigen::Vector2d(1.0, -1.0);
    } else {
        throw ConfigError("weights", "missing required field (only two-asset spreads have a default)");
    }
    if (cfg.contract.weights.size() != d) throw ConfigError("weights", "length differs from spots");
    cfg.contract.strike = detail::number_field(j, "strike");

    if (j.contains("method")) {
        if (!j["method"].is_string()) throw ConfigError("method", "expected a string");
        cfg.method = parse_method(j["method"].get<std::string>());
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) throw ConfigError("output", "expected a string");
        cfg.output = parse_output(j["output"].get<std::string>());
    }
    if (j.contains("order")) {
        if (!is_taylor(cfg.method)) throw ConfigError("order", "order only applies to taylor methods");
        if (!j["order"].is_number_integer()) throw ConfigError("order", "expected an integer");
        cfg.order = j["order"].get<int>();
        if (cfg.order < 0) throw ConfigError("order", "order must be >= 0");
    }
    if (j.contains("ystar")) {
        if (!is_taylor(cfg.method)) throw ConfigError("ystar", "ystar only applies to taylor methods");
        const json& y = j["ystar"];
        if (y.is_string()) {
            if (y.get<std::string>() != "mean") throw ConfigError("ystar", "expected \"mean\" or numbers");
        } else if (y.is_number()) {
            cfg.ystar = Eigen::VectorXd::Constant(1, y.get<double>());
        } else {
            cfg.ystar = detail::vector_field(j, "ystar");
        }
        if (cfg.ystar && cfg.ystar->size() != d - 1) throw ConfigError("ystar", "expected d - 1 components");
    }
    if (j.contains("n_samples")) cfg.n_samples = detail::count_field(j, "n_samples");
    if (j.contains("seed")) cfg.seed = detail::count_field(j, "seed");
    if (j.contains("chunks")) cfg.chunks = static_cast<unsigned>(detail::count_field(j, "chunks"));

    if (is_mc(cfg.method) && cfg.n_samples < 2) throw ConfigError("n_samples", "need at least two samples");
    if (cfg.method == Method::Margrabe) {
        if (d != 2) throw ConfigError("method", "margrabe requires two assets");
        if (cfg.contract.strike != 0.0) throw ConfigError("strike", "margrabe requires strike 0");
    }
    if (cfg.method == Method::TaylorClosed) {
        if (d != 2) throw ConfigError("method", "taylor-closed requires two assets");
        if (cfg.order != 1 && cfg.order != 2) throw ConfigError("order", "taylor-closed supports orders 1 and 2");
    }
    return cfg;
}

/// Configuration fields of `cfg` as JSON; parse_config(to_json(cfg)) == cfg.
inline json to_json(const RunConfig& cfg) {
    const Eigen::Index d = cfg.model.dim();
    json j;
    j["spots"] = std::vector<double>(cfg.model.spots.data(), cfg.model.spots.data() + d);
    j["vols"] = std::vector<double>(cfg.model.vols.data(), cfg.model.vols.data() + d);
    json corr = json::array();
    for (Eigen::Index i = 0; i < d; ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < d; ++k) row.push_back(cfg.model.corr(i, k));
        corr.push_back(row);
    }
    j["corr"] = corr;
    j["rate"] = cfg.model.rate;
    j["maturity"] = cfg.model.maturity;
    j["weights"] = std::vector<double>(cfg.contract.weights.data(), cfg.contract.weights.data() + d);
    j["strike"] = cfg.contract.strike;
    j["method"] = to_string(cfg.method);
    if (is_taylor(cfg.method)) {
        j["order"] = cfg.order;
        if (cfg.ystar) {
            j["ystar"] = std::vector<double>(cfg.ystar->data(), cfg.ystar->data() + cfg.ystar->size());
        } else {
            j["ystar"] = "mean";
        }
    }
    if (is_mc(cfg.method)) {
        j["n_samples"] = cfg.n_samples;
        j["seed"] = cfg.seed;
    }
    j["output"] = to_string(cfg.output);
    return j;
}

}  // namespace basket_taylor::cli
