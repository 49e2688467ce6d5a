#pragma once

// Commands behind the `basket_taylor` executable. Each command renders its
// whole output into a string; argument handling lives in tools/.

#include "basket_taylor/basket_taylor.hpp"
#include "basket_taylor/cli/config.hpp"

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace basket_taylor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline int exit_code_for(const PricingError& e) {
    switch (e.code()) {
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::NonpositiveStrike:
        case ErrorCode::SingularConditioning: return kExitNumerical;
        default: return kExitConfig;
    }
}

/// Fixed-point price formatting used by every text and CSV output.
inline std::string fixed(double x, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

inline std::string shortest(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

inline std::string join(const Eigen::VectorXd& v, const char* sep, bool short_form = true) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += sep;
        out += short_form ? shortest(v(i)) : fixed(v(i));
    }
    return out;
}

struct PriceOutcome {
    double price = 0.0;
    std::optional<double> std_error;
    std::vector<double> terms;
    std::optional<Eigen::VectorXd> expansion_point;
};

inline Eigen::VectorXd resolve_ystar(const RunConfig& cfg) { return cfg.ystar ? *cfg.ystar : y_mean(cfg.model); }

inline PriceOutcome evaluate(const RunConfig& cfg) {
    PriceOutcome out;
    switch (cfg.method) {
        case Method::Taylor: {
            const TaylorQuote q = price_taylor(cfg.model, cfg.contract, cfg.order, resolve_ystar(cfg));
            out.price = q.price;
            out.terms = q.terms;
            out.expansion_point = q.expansion_point;
            break;
        }
        case Method::TaylorClosed: {
            const Eigen::VectorXd ystar = resolve_ystar(cfg);
            const auto [p1, p2] = price_spread_closed12(make_spread_context(cfg.model, cfg.contract), ystar(0));
            out.price = cfg.order == 1 ? p1 : p2;
            out.expansion_point = ystar;
            break;
        }
        case Method::McFull:
        case Method::McPartial: {
            const McEstimate e = cfg.method == Method::McFull
                                     ? mc_full(cfg.model, cfg.contract, cfg.n_samples, cfg.seed, cfg.chunks)
                                     : mc_partial(cfg.model, cfg.contract, cfg.n_samples, cfg.seed, cfg.chunks);
            out.price = e.price;
            out.std_error = e.std_error;
            break;
        }
        case Method::Margrabe: out.price = margrabe_exact(cfg.model, cfg.contract); break;
    }
    return out;
}

inline constexpr const char* kPriceCsvHeader = "method,order,expansion_point,price,stderr,n_samples,seed";

/// Prices one contract and renders it in the configured format.
inline std::string cmd_price(const RunConfig& cfg) {
    const PriceOutcome r = evaluate(cfg);
    std::ostringstream os;
    switch (cfg.output) {
        case OutputFormat::Text: {
            os << "method: " << to_string(cfg.method);
            if (is_taylor(cfg.method)) {
                os << " (order " << cfg.order << ", y* = " << join(*r.expansion_point, ", ") << ")";
            }
            os << "\nprice: " << fixed(r.price);
            if (r.std_error) os << " ± " << fixed(*r.std_error) << " (n=" << cfg.n_samples << ", seed=" << cfg.seed << ")";
            os << "\n";
            for (std::size_t l = 0; l < r.terms.size(); ++l) os << "term[" << l << "]: " << fixed(r.terms[l]) << "\n";
            break;
        }
        case OutputFormat::Json: {
            json j = to_json(cfg);
            j["price"] = r.price;
            if (r.std_error) j["stderr"] = *r.std_error;
            if (!r.terms.empty()) j["terms"] = r.terms;
            if (r.expansion_point) {
                j["expansion_point"] =
                    std::vector<double>(r.expansion_point->data(), r.expansion_point->data() + r.expansion_point->size());
            }
            os << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::Csv: {
            os << kPriceCsvHeader << "\n";
            os << to_string(cfg.method) << ",";
            if (is_taylor(cfg.method)) os << cfg.order;
            os << ",";
            if (r.expansion_point) os << join(*r.expansion_point, ";");
            os << "," << fixed(r.price) << ",";
            if (r.std_error) os << fixed(*r.std_error) << "," << cfg.n_samples << "," << cfg.seed;
            else os << ",,";
            os << "\n";
            break;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Reproduction tables for the two-asset benchmark:
// S = (100, 96), vols = (0.3, 0.1), rho = -0.3, r = 0.03, K = 1, T = 1.

struct BenchmarkCase {
    double spot1 = 100.0;
    double spot2 = 96.0;
    double rho = -0.3;
    double strike = 1.0;
    double ystar = 0.0;

    MarketModel model() const { return MarketModel::two_asset(spot1, spot2, 0.3, 0.1, rho, 0.03, 1.0); }
    BasketContract contract() const { return BasketContract::spread(strike); }
};

inline std::vector<BenchmarkCase> table_cases(int which) {
    std::vector<BenchmarkCase> out;
    switch (which) {
        case 1:
            for (double rho : {0.3, -0.3, 0.5, -0.5}) out.push_back({100.0, 96.0, rho, 1.0, 0.0});
            break;
        case 2:
            for (double y : {-0.015, -0.02, -0.05, 0.0, 0.01}) out.push_back({100.0, 96.0, -0.7, 1.0, y});
            break;
        case 3:
            out = {{90.0, 100.0, -0.3, 5.0, 0.065},
                   {90.0, 110.0, -0.3, 5.0, 0.037},
                   {90.0, 100.0, -0.3, 10.0, 0.05},
                   {90.0, 110.0, -0.3, 10.0, 0.03}};
            break;
        default: throw ConfigError("table", "table must be 1, 2 or 3");
    }
    return out;
}

inline std::string table_header(int which) {
    switch (which) {
        case 1: return "correlation,monte_carlo,partial_monte_carlo,first_approx,second_approx";
        case 2: return "expansion_point,monte_carlo,partial_monte_carlo,first_approx,second_approx";
        case 3: return "parameters,monte_carlo,first_approx,second_approx";
        default: throw ConfigError("table", "table must be 1, 2 or 3");
    }
}

/// Reproduces one of the three spread tables as CSV. Taylor columns are
/// deterministic; Monte Carlo columns use `seed` and `n_samples` paths.
inline std::string cmd_table(int which, std::uint64_t n_samples, std::uint64_t seed, unsigned chunks = 0) {
    const std::vector<BenchmarkCase> cases = table_cases(which);
    std::ostringstream os;
    os << table_header(which) << "\n";

    // Table 2 varies only the expansion point, so its Monte Carlo columns are shared.
    std::optional<std::pair<double, double>> shared_mc;
    for (const BenchmarkCase& c : cases) {
        const MarketModel model = c.model();
        const BasketContract contract = c.contract();
        const double first = price_spread_taylor(model, contract, 1, c.ystar).price;
        const double second = price_spread_taylor(model, contract, 2, c.ystar).price;

        double full = 0.0;
        double partial = 0.0;
        if (which == 2 && shared_mc) {
            std::tie(full, partial) = *shared_mc;
        } else {
            full = mc_full(model, contract, n_samples, seed, chunks).price;
            if (which != 3) partial = mc_partial(model, contract, n_samples, seed, chunks).price;
            if (which == 2) shared_mc = {full, partial};
        }

        switch (which) {
            case 1: os << fixed(c.rho, 4); break;
            case 2: os << shortest(c.ystar); break;
            default:
                os << "S1=" << shortest(c.spot1) << " S2=" << shortest(c.spot2) << " K=" << shortest(c.strike)
                   << " y*=" << shortest(c.ystar);
        }
        os << "," << fixed(full);
        if (which != 3) os << "," << fixed(partial);
        os << "," << fixed(first) << "," << fixed(second) << "\n";
    }
    return os.str();
}

inline constexpr const char* kCurveCsvHeader = "y,exact,first_order,second_order";

/// Conditional price C(y) against its first- and second-order Taylor
/// polynomials around y* on `points` equally spaced y in [y_lo, y_hi].
inline std::string cmd_curve(const RunConfig& cfg, double y_lo, double y_hi, int points) {
    if (!(y_lo < y_hi)) throw ConfigError("range", "y_lo must be below y_hi");
    if (points < 2) throw ConfigError("points", "need at least two points");
    if (cfg.model.dim() != 2) throw ConfigError("spots", "the conditional price curve needs two assets");
    const SpreadContext ctx = make_spread_context(cfg.model, cfg.contract);
    const double ystar = resolve_ystar(cfg)(0);
    const double c0 = cond_price(ctx, ystar);
    const double c1 = d1_c(ctx, ystar);
    const double c2 = d2_c(ctx, ystar);

    std::ostringstream os;
    os << kCurveCsvHeader << "\n";
    for (int i = 0; i < points; ++i) {
        const double y = y_lo + (y_hi - y_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double dy = y - ystar;
        const double tangent = c0 + c1 * dy;
        os << fixed(y) << "," << fixed(cond_price(ctx, y)) << "," << fixed(tangent) << ","
           << fixed(tangent + 0.5 * c2 * dy * dy) << "\n";
    }
    return os.str();
}

struct Histogram {
    std::vector<double> edges;                 // bins + 1 edges
    std::vector<std::vector<std::uint64_t>> counts;  // counts[asset][bin]
};

/// Bins the simulated terminal log-returns of every asset. Without an
/// explicit range the bins span the sample minimum to maximum so every draw
/// is counted; with one, draws outside [lo, hi] are left out.
inline Histogram histogram(const RunConfig& cfg, std::uint64_t n, std::uint64_t seed, int bins,
                           std::optional<std::pair<double, double>> range = std::nullopt) {
    if (bins < 1) throw ConfigError("bins", "need at least one bin");
    const Eigen::MatrixXd draws = sample_terminal(cfg.model, n, seed, cfg.chunks);
    double lo = range ? range->first : draws.minCoeff();
    double hi = range ? range->second : draws.maxCoeff();
    if (range && !(lo < hi)) throw ConfigError("range", "lo must be below hi");
    if (!(lo < hi)) hi = lo + 1.0;

    Histogram h;
    for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
    h.counts.assign(static_cast<std::size_t>(draws.cols()), std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0));
    const double width = (hi - lo) / bins;
    for (Eigen::Index a = 0; a < draws.cols(); ++a) {
        for (Eigen::Index i = 0; i < draws.rows(); ++i) {
            const double v = draws(i, a);
            if (v < lo || v > hi) continue;
            auto bin = static_cast<int>((v - lo) / width);
            bin = std::clamp(bin, 0, bins - 1);
            ++h.counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(bin)];
        }
    }
    return h;
}

/// CSV columns: bin_lo, bin_hi, asset_1 .. asset_d.
inline std::string cmd_hist(const RunConfig& cfg, std::uint64_t n, std::uint64_t seed, int bins,
                            std::optional<std::pair<double, double>> range = std::nullopt) {
    const Histogram h = histogram(cfg, n, seed, bins, range);
    std::ostringstream os;
    os << "bin_lo,bin_hi";
    for (std::size_t a = 0; a < h.counts.size(); ++a) os << ",asset_" << a + 1;
    os << "\n";
    for (int b = 0; b < bins; ++b) {
        os << fixed(h.edges[static_cast<std::size_t>(b)]) << "," << fixed(h.edges[static_cast<std::size_t>(b) + 1]);
        for (const auto& c : h.counts) os << "," << c[static_cast<std::size_t>(b)];
        os << "\n";
    }
    return os.str();
}

}  // namespace basket_taylor::cli
