#pragma once

// Monte Carlo validation estimators.
//
// Paths are grouped into fixed-size blocks. Each block is accumulated in path
// order and the block statistics are merged in block order, so an estimate is
// bit-identical for any number of worker chunks.

#include "basket_taylor/conditional_pricer.hpp"
#include "basket_taylor/core_model.hpp"
#include "basket_taylor/error.hpp"
#include "basket_taylor/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace basket_taylor {

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    std::uint64_t n = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

inline constexpr std::uint64_t kMcBlockSize = 4096;

namespace detail {

enum Stream : std::uint32_t { kTerminalStream = 0, kConditionalStream = 1 };

struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningStats& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(count + o.count);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.count) / total;
        m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
        count += o.count;
    }
};

inline unsigned resolve_chunks(unsigned chunks) {
    if (chunks > 0) return chunks;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(first_path, last_path, block_index) over every block, spread
/// over `chunks` workers that each own a contiguous range of blocks.
template <class Body>
void for_each_block(std::uint64_t n, unsigned chunks, Body&& body) {
    const std::uint64_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
    const std::uint64_t workers = std::min<std::uint64_t>(resolve_chunks(chunks), std::max<std::uint64_t>(blocks, 1));
    auto run = [&](std::uint64_t w) {
        const std::uint64_t lo = blocks * w / workers;
        const std::uint64_t hi = blocks * (w + 1) / workers;
        for (std::uint64_t b = lo; b < hi; ++b) {
            body(b * kMcBlockSize, std::min(n, (b + 1) * kMcBlockSize), b);
        }
    };
    if (workers <= 1) {
        run(0);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::uint64_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
}

template <class PathValue>
McEstimate estimate(std::uint64_t n, std::uint64_t seed, unsigned chunks, PathValue&& value) {
    const std::uint64_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
    std::vector<RunningStats> partial(blocks);
    for_each_block(n, chunks, [&](std::uint64_t first, std::uint64_t last, std::uint64_t b) {
        RunningStats s;
        std::vector<double> scratch;
        for (std::uint64_t i = first; i < last; ++i) s.push(value(i, scratch));
        partial[b] = s;
    });
    RunningStats total;
    for (const auto& s : partial) total.merge(s);

    McEstimate out;
    out.price = total.mean;
    out.n = n;
    out.seed = seed;
    out.std_error = n > 1 ? std::sqrt(total.m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return out;
}

}  // namespace detail

/// n draws of the terminal log-returns, one row per draw.
inline Eigen::MatrixXd sample_terminal(const MarketModel& model, std::uint64_t n, std::uint64_t seed,
                                       unsigned chunks = 0) {
    if (n < 1) throw PricingError(ErrorCode::InvalidArgument, "n_samples", "need at least one sample");
    const TerminalLaw law = terminal_law(model);
    const Eigen::MatrixXd lower = cholesky(law.cov);
    const Eigen::Index d = model.dim();
    const Philox4x32 gen(seed);

    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
    detail::for_each_block(n, chunks, [&](std::uint64_t first, std::uint64_t last, std::uint64_t) {
        Eigen::VectorXd z(d);
        for (std::uint64_t i = first; i < last; ++i) {
            path_normals(gen, detail::kTerminalStream, i, std::span<double>(z.data(), static_cast<std::size_t>(d)));
            out.row(static_cast<Eigen::Index>(i)) = (law.mean + lower * z).transpose();
        }
    });
    return out;
}

/// Plain Monte Carlo: discounted average payoff over exact terminal draws.
inline McEstimate mc_full(const MarketModel& model, const BasketContract& contract, std::uint64_t n,
                          std::uint64_t seed, unsigned chunks = 0) {
    if (n < 2) throw PricingError(ErrorCode::InvalidArgument, "n_samples", "need at least two samples");
    validate(model);
    validate(contract, model.dim());
    const TerminalLaw law = terminal_law(model);
    const Eigen::MatrixXd lower = cholesky(law.cov);
    const Eigen::Index d = model.dim();
    const double discount = std::exp(-model.rate * model.maturity);
    const Philox4x32 gen(seed);

    return detail::estimate(n, seed, chunks, [&](std::uint64_t i, std::vector<double>& z) {
        z.resize(static_cast<std::size_t>(d));
        path_normals(gen, detail::kTerminalStream, i, z);
        double basket = -contract.strike;
        for (Eigen::Index a = 0; a < d; ++a) {
            double y = law.mean(a);
            for (Eigen::Index b = 0; b <= a; ++b) y += lower(a, b) * z[static_cast<std::size_t>(b)];
            basket += contract.weights(a) * model.spots(a) * std::exp(y);
        }
        return discount * std::max(basket, 0.0);
    });
}

/// Conditional Monte Carlo: samples only the last d - 1 log-returns and
/// averages the closed-form conditional price of the first asset.
inline McEstimate mc_partial(const MarketModel& model, const BasketContract& contract, std::uint64_t n,
                             std::uint64_t seed, unsigned chunks = 0) {
    if (n < 2) throw PricingError(ErrorCode::InvalidArgument, "n_samples", "need at least two samples");
    const BasketContext ctx = make_basket_context(model, contract);
    const Eigen::MatrixXd lower = cholesky(ctx.rest_cov);
    const Eigen::Index m = ctx.rest_dim();
    const double log_tilt = ctx.log_tilt();
    const Philox4x32 gen(seed);

    return detail::estimate(n, seed, chunks, [&](std::uint64_t i, std::vector<double>& z) {
        z.resize(2 * static_cast<std::size_t>(m));
        path_normals(gen, detail::kConditionalStream, i, std::span<double>(z.data(), static_cast<std::size_t>(m)));
        Eigen::Map<Eigen::VectorXd> y(z.data() + m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
            double v = ctx.rest_mean(a);
            for (Eigen::Index b = 0; b <= a; ++b) v += lower(a, b) * z[static_cast<std::size_t>(b)];
            y(a) = v;
        }
        return ctx.w1 * std::exp(log_tilt + ctx.cond.slope.dot(y)) * cond_price(ctx, y);
    });
}

}  // namespace basket_taylor
