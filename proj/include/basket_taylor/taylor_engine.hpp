#pragma once

// Sampling-free basket prices from a Taylor expansion of the conditional
// price C(y) around an expansion point y*. The outer expectation of every
// polynomial term is a Gaussian exponential-power moment, evaluated in closed
// form.

#include "basket_taylor/conditional_pricer.hpp"
#include "basket_taylor/core_model.hpp"
#include "basket_taylor/error.hpp"
#include "basket_taylor/gaussian_moments.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace basket_taylor {

inline constexpr int kSpreadOrderCap = 6;
inline constexpr int kBasketOrderCap = 2;

struct TaylorQuote {
    int order = 0;
    Eigen::VectorXd expansion_point;
    double price = 0.0;
    std::vector<double> terms;  // terms[l] is the order-l contribution
};

/// E(m) = sum_nu C(m, nu) (vol1 rho sqrt(T))^{m - nu} E[Z^nu].
inline double e_of_m(const SpreadContext& ctx, int m) {
    if (m < 0) throw PricingError(ErrorCode::InvalidArgument, "m", "order must be >= 0");
    const double a = ctx.vol1 * ctx.rho * std::sqrt(ctx.maturity);
    double sum = 0.0;
    for (int nu = 0; nu <= m; ++nu) sum += binomial(m, nu) * std::pow(a, m - nu) * std_normal_moment(nu);
    return sum;
}

/// Risk-neutral mean of the conditioning log-returns, (r - vol_k^2 / 2) T for k = 2..d.
inline Eigen::VectorXd y_mean(const MarketModel& model) {
    const Eigen::Index m = model.dim() - 1;
    return ((model.rate - 0.5 * model.vols.tail(m).array().square()) * model.maturity).matrix();
}

/// n-th order expansion of a two-asset basket around the scalar y*.
inline TaylorQuote price_spread_taylor(const SpreadContext& ctx, int order, double ystar) {
    if (order < 0) throw PricingError(ErrorCode::InvalidArgument, "order", "order must be >= 0");
    if (order > kSpreadOrderCap) {
        throw PricingError(ErrorCode::OrderCapExceeded, "order", "spread expansions are capped at order 6");
    }
    const double root_t_vol2 = std::sqrt(ctx.maturity) * ctx.vol2;
    const double gap = b_of_ystar(ctx, ystar);

    std::vector<double> e(static_cast<std::size_t>(order) + 1);
    for (int m = 0; m <= order; ++m) e[static_cast<std::size_t>(m)] = e_of_m(ctx, m);

    TaylorQuote quote;
    quote.order = order;
    quote.expansion_point = Eigen::VectorXd::Constant(1, ystar);
    double factorial = 1.0;
    for (int l = 0; l <= order; ++l) {
        if (l > 0) factorial *= l;
        const double derivative = cond_price_derivative(ctx, ystar, l);
        double moment = 0.0;
        for (int m = 0; m <= l; ++m) {
            moment += binomial(l, m) * std::pow(root_t_vol2, m) * std::pow(gap, l - m) * e[static_cast<std::size_t>(m)];
        }
        quote.terms.push_back(ctx.scale * derivative / factorial * moment);
    }
    quote.price = std::accumulate(quote.terms.begin(), quote.terms.end(), 0.0);
    return quote;
}

inline TaylorQuote price_spread_taylor(const MarketModel& model, const BasketContract& contract, int order,
                                       double ystar) {
    return price_spread_taylor(make_spread_context(model, contract), order, ystar);
}

/// First and second order prices in their expanded closed forms.
inline std::pair<double, double> price_spread_closed12(const SpreadContext& ctx, double ystar) {
    const double T = ctx.maturity;
    const double cov12 = T * ctx.vol1 * ctx.vol2 * ctx.rho;
    const double b = b_of_ystar(ctx, ystar);
    const double p1 = cond_price(ctx, ystar) + d1_c(ctx, ystar) * (b + cov12);
    const double second_moment =
        b * b + 2.0 * cov12 * b + T * ctx.vol2 * ctx.vol2 * (1.0 + T * ctx.vol1 * ctx.vol1 * ctx.rho * ctx.rho);
    const double p2 = p1 + 0.5 * d2_c(ctx, ystar) * second_moment;
    return {ctx.scale * p1, ctx.scale * p2};
}

/// Expansion of a d-asset basket (order <= 2) around the vector y*.
inline TaylorQuote price_basket_taylor(const BasketContext& ctx, int order, const Eigen::VectorXd& ystar) {
    if (order < 0) throw PricingError(ErrorCode::InvalidArgument, "order", "order must be >= 0");
    if (order > kBasketOrderCap) {
        throw PricingError(ErrorCode::OrderCapExceeded, "order", "basket expansions are capped at order 2");
    }
    const Eigen::Index m = ctx.rest_dim();
    if (ystar.size() != m) {
        throw PricingError(ErrorCode::InvalidArgument, "ystar", "expansion point must have d - 1 components");
    }

    PriceDerivatives deriv;
    if (order == 0) {
        deriv.value = cond_price(ctx, ystar);
    } else {
        deriv = cond_price_derivatives(ctx, ystar);
    }
    const double tilt = std::exp(ctx.log_tilt());
    auto expectation = [&](const MultiIndex& L) {
        return tilt * mixed_exp_power_moment(ctx.rest_mean, ctx.rest_cov, ctx.cond.slope, ystar, L);
    };

    TaylorQuote quote;
    quote.order = order;
    quote.expansion_point = ystar;
    for (int l = 0; l <= order; ++l) {
        double term = 0.0;
        for (const MultiIndex& L : MultiIndex::of_total(static_cast<std::size_t>(m), l)) {
            double d = deriv.value;
            if (l == 1) {
                for (Eigen::Index k = 0; k < m; ++k) {
                    if (L[static_cast<std::size_t>(k)] == 1) d = deriv.gradient(k);
                }
            } else if (l == 2) {
                Eigen::Index i = -1;
                Eigen::Index j = -1;
                for (Eigen::Index k = 0; k < m; ++k) {
                    const int lk = L[static_cast<std::size_t>(k)];
                    if (lk == 2) i = j = k;
                    if (lk == 1) (i < 0 ? i : j) = k;
                }
                d = deriv.hessian(i, j);
            }
            term += d / L.factorial_product() * expectation(L);
        }
        quote.terms.push_back(ctx.w1 * term);
    }
    quote.price = std::accumulate(quote.terms.begin(), quote.terms.end(), 0.0);
    return quote;
}

inline TaylorQuote price_basket_taylor(const MarketModel& model, const BasketContract& contract, int order,
                                       const Eigen::VectorXd& ystar) {
    return price_basket_taylor(make_basket_context(model, contract), order, ystar);
}

/// Taylor price through the spread kernel for d = 2 and the basket kernel otherwise.
inline TaylorQuote price_taylor(const MarketModel& model, const BasketContract& contract, int order,
                                const Eigen::VectorXd& ystar) {
    if (model.dim() == 2) {
        if (ystar.size() != 1) {
            throw PricingError(ErrorCode::InvalidArgument, "ystar", "expansion point must have d - 1 components");
        }
        return price_spread_taylor(model, contract, order, ystar(0));
    }
    return price_basket_taylor(model, contract, order, ystar);
}

/// Delta of the order-n price with respect to spot j, by a central bump of
/// size h (default 1e-4 S_j). The expansion point is held fixed.
inline double approx_delta(const MarketModel& model, const BasketContract& contract, int order,
                           const Eigen::VectorXd& ystar, Eigen::Index asset, double bump = 0.0) {
    if (asset < 0 || asset >= model.dim()) {
        throw PricingError(ErrorCode::InvalidArgument, "asset", "asset index out of range");
    }
    const double h = bump > 0.0 ? bump : 1e-4 * model.spots(asset);
    MarketModel up = model;
    MarketModel down = model;
    up.spots(asset) += h;
    down.spots(asset) -= h;
    return (price_taylor(up, contract, order, ystar).price - price_taylor(down, contract, order, ystar).price) /
           (2.0 * h);
}

/// Exact price of the exchange option (w1 S1 + w2 S2)_+ with w2 < 0.
inline double margrabe_exact(const MarketModel& model, const BasketContract& contract) {
    validate(model);
    if (model.dim() != 2) throw PricingError(ErrorCode::InvalidArgument, "spots", "margrabe requires d = 2");
    validate(contract, 2);
    if (contract.strike != 0.0) {
        throw PricingError(ErrorCode::InvalidArgument, "strike", "margrabe requires strike 0");
    }
    if (!(contract.weights(1) < 0.0)) {
        throw PricingError(ErrorCode::InvalidArgument, "weights[1]", "margrabe requires a short second leg");
    }
    const double long_leg = contract.weights(0) * model.spots(0);
    const double short_leg = -contract.weights(1) * model.spots(1);
    const double v1 = model.vols(0);
    const double v2 = model.vols(1);
    const double rho = model.corr(0, 1);
    const double var = std::max(v1 * v1 + v2 * v2 - 2.0 * rho * v1 * v2, 0.0);
    const double vs = std::sqrt(var * model.maturity);
    if (vs == 0.0) return std::max(long_leg - short_leg, 0.0);
    const double d1 = (std::log(long_leg / short_leg) + 0.5 * vs * vs) / vs;
    return long_leg * norm_cdf(d1) - short_leg * norm_cdf(d1 - vs);
}

}  // namespace basket_taylor
