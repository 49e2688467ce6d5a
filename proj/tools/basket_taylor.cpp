// basket_taylor: price basket and spread options by Taylor expansion of the
// conditional Black-Scholes price, with Monte Carlo and exact references.

#include "basket_taylor/cli/commands.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using basket_taylor::cli::ConfigError;
using basket_taylor::cli::json;

std::vector<double> parse_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(field, "cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw ConfigError(field, "empty list");
    return out;
}

// Flags given on the command line, merged over the JSON config file.
struct Overrides {
    std::string config_path;
    std::optional<std::string> spots, vols, corr, weights, ystar, method, output;
    std::optional<double> rate, maturity, strike;
    std::optional<int> order;
    std::optional<std::uint64_t> n_samples, seed;
    std::optional<unsigned> chunks;

    void attach(CLI::App* app, bool pricing_fields) {
        app->add_option("-c,--config", config_path, "JSON config file (flags override its fields)");
        app->add_option("--spots", spots, "Comma-separated initial spots");
        app->add_option("--vols", vols, "Comma-separated annualized volatilities");
        app->add_option("--corr", corr, "One pairwise correlation, or a row-major d*d list");
        app->add_option("--rate", rate, "Continuously compounded risk-free rate");
        app->add_option("--maturity", maturity, "Maturity in years");
        app->add_option("--weights", weights, "Comma-separated basket weights (default 1,-1 for two assets)");
        app->add_option("--strike", strike, "Strike");
        if (pricing_fields) {
            app->add_option("--method", method, "taylor | taylor-closed | mc-full | mc-partial | margrabe");
            app->add_option("--order", order, "Taylor order (taylor methods only)");
            app->add_option("--ystar", ystar, "Expansion point: 'mean' or d-1 comma-separated log-returns");
            app->add_option("--samples", n_samples, "Monte Carlo sample count");
            app->add_option("--output", output, "text | json | csv");
        }
        app->add_option("--seed", seed, "Monte Carlo seed (env BASKET_TAYLOR_SEED when absent)");
        app->add_option("--chunks", chunks, "Parallel chunks (0 = hardware threads; results do not depend on it)");
    }

    json merged() const {
        json j = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("config", "cannot open " + config_path);
            try {
                in >> j;
            } catch (const json::parse_error& e) {
                throw ConfigError("config", std::string("invalid JSON: ") + e.what());
            }
            if (!j.is_object()) throw ConfigError("config", "top level must be an object");
        }
        if (spots) j["spots"] = parse_list(*spots, "spots");
        if (vols) j["vols"] = parse_list(*vols, "vols");
        if (corr) {
            const std::vector<double> c = parse_list(*corr, "corr");
            if (c.size() == 1) {
                j["corr"] = c[0];
            } else {
                std::size_t d = 0;
                while (d * d < c.size()) ++d;
                if (d * d != c.size()) throw ConfigError("corr", "expected one value or d*d values");
                json m = json::array();
                for (std::size_t i = 0; i < d; ++i) m.push_back(std::vector<double>(c.begin() + i * d, c.begin() + (i + 1) * d));
                j["corr"] = m;
            }
        }
        if (weights) j["weights"] = parse_list(*weights, "weights");
        if (rate) j["rate"] = *rate;
        if (maturity) j["maturity"] = *maturity;
        if (strike) j["strike"] = *strike;
        if (method) {
            j["method"] = *method;
            // Taylor-only keys inherited from the file yield to a non-Taylor method flag.
            if (*method != "taylor" && *method != "taylor-closed") {
                j.erase("order");
                j.erase("ystar");
            }
        }
        if (order) j["order"] = *order;
        if (ystar) {
            if (*ystar == "mean") j["ystar"] = "mean";
            else j["ystar"] = parse_list(*ystar, "ystar");
        }
        if (n_samples) j["n_samples"] = *n_samples;
        if (output) j["output"] = *output;
        if (chunks) j["chunks"] = *chunks;
        if (seed) {
            j["seed"] = *seed;
        } else if (const char* env = std::getenv("BASKET_TAYLOR_SEED"); env != nullptr && *env != '\0') {
            try {
                std::size_t used = 0;
                j["seed"] = std::stoull(env, &used);
                if (env[used] != '\0') throw std::invalid_argument(env);
            } catch (const std::exception&) {
                throw ConfigError("BASKET_TAYLOR_SEED", "expected a non-negative integer");
            }
        }
        return j;
    }
};

constexpr const char* kDescription =
    "Basket and spread option pricing by Taylor expansion of the conditional Black-Scholes price.\n"
    "\n"
    "CSV column order (fixed, '.' decimal separator, no thousands separators):\n"
    "  price --output csv : method,order,expansion_point,price,stderr,n_samples,seed\n"
    "  table 1            : correlation,monte_carlo,partial_monte_carlo,first_approx,second_approx\n"
    "  table 2            : expansion_point,monte_carlo,partial_monte_carlo,first_approx,second_approx\n"
    "  table 3            : parameters,monte_carlo,first_approx,second_approx\n"
    "  curve              : y,exact,first_order,second_order\n"
    "  hist               : bin_lo,bin_hi,asset_1,...,asset_d\n"
    "\n"
    "Exit codes: 0 ok, 2 configuration error, 3 numerical failure.";

}  // namespace

int main(int argc, char** argv) {
    namespace cli = basket_taylor::cli;

    CLI::App app{kDescription, "basket_taylor"};
    app.require_subcommand(1);

    Overrides price_opts;
    auto* price = app.add_subcommand("price", "Price one contract");
    price_opts.attach(price, true);

    int table_id = 1;
    std::uint64_t table_samples = cli::kDefaultSamples;
    std::optional<std::uint64_t> table_seed;
    unsigned table_chunks = 0;
    auto* table = app.add_subcommand("table", "Reproduce spread table 1, 2 or 3 as CSV");
    table->add_option("which", table_id, "Table number")->required()->check(CLI::Range(1, 3));
    table->add_option("--samples", table_samples, "Monte Carlo sample count per cell");
    table->add_option("--seed", table_seed, "Monte Carlo seed (env BASKET_TAYLOR_SEED when absent)");
    table->add_option("--chunks", table_chunks, "Parallel chunks");

    Overrides curve_opts;
    double curve_lo = -1.0;
    double curve_hi = 1.0;
    int curve_points = 201;
    std::optional<std::string> curve_ystar;
    auto* curve = app.add_subcommand("curve", "Conditional price C(y) and its Taylor polynomials as CSV");
    curve_opts.attach(curve, false);
    curve->add_option("--ystar", curve_ystar, "Expansion point ('mean' or a number)");
    curve->add_option("--lo", curve_lo, "Lowest y");
    curve->add_option("--hi", curve_hi, "Highest y");
    curve->add_option("--points", curve_points, "Number of grid points");

    Overrides hist_opts;
    std::uint64_t hist_samples = 100'000;
    int hist_bins = 50;
    std::optional<double> hist_lo, hist_hi;
    auto* hist = app.add_subcommand("hist", "Histogram of simulated terminal log-returns as CSV");
    hist_opts.attach(hist, false);
    hist->add_option("--samples", hist_samples, "Number of draws");
    hist->add_option("--bins", hist_bins, "Number of bins");
    hist->add_option("--lo", hist_lo, "Lower edge (default: sample minimum)");
    hist->add_option("--hi", hist_hi, "Upper edge (default: sample maximum)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitConfig;
    }

    try {
        if (*price) {
            const cli::RunConfig cfg = cli::parse_config(price_opts.merged());
            std::cout << cli::cmd_price(cfg);
        } else if (*table) {
            std::uint64_t seed = cli::kDefaultSeed;
            Overrides env_only;
            env_only.seed = table_seed;
            const json j = env_only.merged();
            if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
            std::cout << cli::cmd_table(table_id, table_samples, seed, table_chunks);
        } else if (*curve) {
            json j = curve_opts.merged();
            if (curve_ystar) {
                j["method"] = "taylor";
                if (*curve_ystar == "mean") j["ystar"] = "mean";
                else j["ystar"] = parse_list(*curve_ystar, "ystar");
            }
            std::cout << cli::cmd_curve(cli::parse_config(j), curve_lo, curve_hi, curve_points);
        } else if (*hist) {
            json j = hist_opts.merged();
            if (!j.contains("strike")) j["strike"] = 0.0;  // the histogram does not depend on the contract
            const cli::RunConfig cfg = cli::parse_config(j);
            std::optional<std::pair<double, double>> range;
            if (hist_lo || hist_hi) {
                if (!hist_lo || !hist_hi) throw ConfigError("range", "give both --lo and --hi");
                range = std::make_pair(*hist_lo, *hist_hi);
            }
            std::cout << cli::cmd_hist(cfg, hist_samples, cfg.seed, hist_bins, range);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitConfig;
    } catch (const basket_taylor::PricingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitNumerical;
    }
    return cli::kExitOk;
}
