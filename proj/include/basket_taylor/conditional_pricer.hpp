#pragma once

// One-dimensional conditional price of a two-asset basket. Conditioning the
// first log-return on the second, Y2 = y, leaves a Black-Scholes call on the
// first asset with residual volatility sqrt(1 - rho^2) vol1 and the shifted
// strike K(y). Everything here is expressed per unit of the first weight.

#include "basket_taylor/core_model.hpp"
#include "basket_taylor/error.hpp"
#include "basket_taylor/gaussian_moments.hpp"
#include "basket_taylor/jet.hpp"

#include <cmath>

namespace basket_taylor {

/// European call under Black-Scholes. A non-positive strike means the option
/// is always exercised, so the value is the discounted forward S - K e^{-rT}.
inline double bs_call(double spot, double strike, double vol, double rate, double maturity) {
    if (!std::isfinite(spot) || !std::isfinite(strike) || !std::isfinite(vol) || !std::isfinite(rate) ||
        !std::isfinite(maturity)) {
        throw PricingError(ErrorCode::InvalidArgument, "bs_call", "non-finite input");
    }
    if (!(spot > 0.0)) throw PricingError(ErrorCode::NonPositiveInput, "spot", "spot must be positive");
    if (!(vol > 0.0)) throw PricingError(ErrorCode::NonPositiveInput, "vol", "volatility must be positive");
    if (!(maturity > 0.0)) throw PricingError(ErrorCode::NonPositiveInput, "maturity", "maturity must be positive");

    const double discount = std::exp(-rate * maturity);
    if (strike <= 0.0) return spot - strike * discount;

    const double vol_sqrt_t = vol * std::sqrt(maturity);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * maturity) / vol_sqrt_t;
    const double d2 = d1 - vol_sqrt_t;
    return spot * norm_cdf(d1) - strike * discount * norm_cdf(d2);
}

/// Two-asset basket w1 S1 + w2 S2 - K rewritten as w1 (S1 - K'(Y2)) with
/// K'(y) = strike + leg2 e^y, strike = K / w1, leg2 = -(w2 / w1) S2(0).
/// For a plain spread (w = (1, -1)) strike = K and leg2 = S2(0).
struct SpreadContext {
    double spot1 = 0.0;
    double leg2 = 0.0;
    double strike = 0.0;
    double scale = 1.0;  // w1

    double vol1 = 0.0;
    double vol2 = 0.0;
    double rho = 0.0;
    double rate = 0.0;
    double maturity = 1.0;

    ConditionalLaw cond;
    double sigma = 0.0;  // sqrt(1 - rho^2) vol1, annualized
    double ratio = 0.0;  // vol1 rho / vol2, slope of the conditional mean
    double A = 0.0;      // exp(A) collects the y-independent part of the tilt

    /// Conditional mean of Y1 given Y2 = y.
    double mu(double y) const { return cond.intercept + ratio * y; }
};

inline SpreadContext make_spread_context(const MarketModel& model, const BasketContract& contract) {
    validate(model);
    if (model.dim() != 2) throw PricingError(ErrorCode::InvalidArgument, "spots", "spread pricing needs d = 2");
    validate(contract, 2);

    SpreadContext ctx;
    const double w1 = contract.weights(0);
    const double w2 = contract.weights(1);
    ctx.spot1 = model.spots(0);
    ctx.leg2 = -(w2 / w1) * model.spots(1);
    ctx.strike = contract.strike / w1;
    ctx.scale = w1;

    ctx.vol1 = model.vols(0);
    ctx.vol2 = model.vols(1);
    ctx.rho = model.corr(0, 1);
    ctx.rate = model.rate;
    ctx.maturity = model.maturity;

    const double T = ctx.maturity;
    ctx.cond = condition_first(terminal_law(model));
    ctx.sigma = std::sqrt(1.0 - ctx.rho * ctx.rho) * ctx.vol1;
    ctx.ratio = ctx.vol1 * ctx.rho / ctx.vol2;
    ctx.A = -(0.5 * ctx.rho * ctx.rho * ctx.vol1 * ctx.vol1 + ctx.rate * ctx.ratio -
              0.5 * ctx.vol1 * ctx.vol2 * ctx.rho) *
            T;
    if (!(ctx.sigma > 0.0)) {
        throw PricingError(ErrorCode::SingularConditioning, "corr", "conditional volatility vanishes (|rho| = 1)");
    }
    return ctx;
}

/// K(y) = e^{-A} (K e^{-b y} + S2 e^{(1 - b) y}), b = vol1 rho / vol2.
inline double conditional_strike(const SpreadContext& ctx, double y) {
    const double b = ctx.ratio;
    return std::exp(-ctx.A) * (ctx.strike * std::exp(-b * y) + ctx.leg2 * std::exp((1.0 - b) * y));
}

/// Same quantity written through the conditional mean:
/// e^{(r - sigma^2/2) T - mu(y)} (K + S2 e^y).
inline double conditional_strike_via_mean(const SpreadContext& ctx, double y) {
    const double T = ctx.maturity;
    return std::exp((ctx.rate - 0.5 * ctx.sigma * ctx.sigma) * T - ctx.mu(y)) * (ctx.strike + ctx.leg2 * std::exp(y));
}

inline double d1_k(const SpreadContext& ctx, double y) {
    const double b = ctx.ratio;
    return std::exp(-ctx.A) * (-b * ctx.strike * std::exp(-b * y) + ctx.leg2 * (1.0 - b) * std::exp((1.0 - b) * y));
}

inline double d2_k(const SpreadContext& ctx, double y) {
    const double b = ctx.ratio;
    return std::exp(-ctx.A) *
           (b * b * ctx.strike * std::exp(-b * y) + ctx.leg2 * (1.0 - b) * (1.0 - b) * std::exp((1.0 - b) * y));
}

/// C(y): call on asset 1 struck at K(y) with the conditional volatility.
inline double cond_price(const SpreadContext& ctx, double y) {
    return bs_call(ctx.spot1, conditional_strike(ctx, y), ctx.sigma, ctx.rate, ctx.maturity);
}

/// B(y*) = (r - vol2^2 / 2) T - y*, the gap between the mean of Y2 and y*.
inline double b_of_ystar(const SpreadContext& ctx, double ystar) {
    return (ctx.rate - 0.5 * ctx.vol2 * ctx.vol2) * ctx.maturity - ystar;
}

namespace detail {

struct CallState {
    double k, dk, d1, d2, sqrt_t, discount;
};

inline CallState call_state(const SpreadContext& ctx, double y) {
    CallState s{};
    s.k = conditional_strike(ctx, y);
    if (!(s.k > 0.0)) {
        throw PricingError(ErrorCode::NonpositiveStrike, "y",
                           "conditional strike is not positive; the price derivative is undefined here");
    }
    s.dk = d1_k(ctx, y);
    s.sqrt_t = std::sqrt(ctx.maturity);
    s.discount = std::exp(-ctx.rate * ctx.maturity);
    const double vol_sqrt_t = ctx.sigma * s.sqrt_t;
    s.d1 = (std::log(ctx.spot1 / s.k) + (ctx.rate + 0.5 * ctx.sigma * ctx.sigma) * ctx.maturity) / vol_sqrt_t;
    s.d2 = s.d1 - vol_sqrt_t;
    return s;
}

// A_2(y) = S f(d1) + sigma sqrt(T) e^{-rT} K N(d2) - e^{-rT} K f(d2)
inline double a2(const SpreadContext& ctx, const CallState& s) {
    const double vs = ctx.sigma * s.sqrt_t;
    return ctx.spot1 * norm_pdf(s.d1) + vs * s.discount * s.k * norm_cdf(s.d2) - s.discount * s.k * norm_pdf(s.d2);
}

}  // namespace detail

/// dC/dy = -(K'(y) / (K(y) sigma sqrt(T))) A_2(y).
inline double d1_c(const SpreadContext& ctx, double y) {
    const auto s = detail::call_state(ctx, y);
    return -s.dk / (s.k * ctx.sigma * s.sqrt_t) * detail::a2(ctx, s);
}

/// d^2C/dy^2 = -(1 / sigma sqrt(T)) [A_2 (K K'' - K'^2) / K^2 + A_2' K' / K].
inline double d2_c(const SpreadContext& ctx, double y) {
    const auto s = detail::call_state(ctx, y);
    const double vs = ctx.sigma * s.sqrt_t;
    const double ddk = d2_k(ctx, y);
    const double a2 = detail::a2(ctx, s);
    const double kdisc = s.discount * s.k;
    const double da2 = s.dk / (s.k * vs) *
                       (ctx.spot1 * norm_pdf(s.d1) * s.d1 + vs * vs * kdisc * norm_cdf(s.d2) -
                        2.0 * vs * kdisc * norm_pdf(s.d2) - kdisc * norm_pdf(s.d2) * s.d2);
    return -(1.0 / vs) * (a2 * (s.k * ddk - s.dk * s.dk) / (s.k * s.k) + da2 * s.dk / s.k);
}

/// Taylor jet of C around y, exact derivatives of every order up to `order`.
inline Jet cond_price_jet(const SpreadContext& ctx, double y, int order) {
    const double k0 = conditional_strike(ctx, y);
    if (!(k0 > 0.0)) {
        throw PricingError(ErrorCode::NonpositiveStrike, "y",
                           "conditional strike is not positive; the price derivative is undefined here");
    }
    const double b = ctx.ratio;
    const double T = ctx.maturity;
    const Jet t = Jet::variable(order, y);
    const Jet k = std::exp(-ctx.A) * (ctx.strike * exp(t * (-b)) + ctx.leg2 * exp(t * (1.0 - b)));
    const double vs = ctx.sigma * std::sqrt(T);
    const Jet d1 = (log(k) * -1.0 + (std::log(ctx.spot1) + (ctx.rate + 0.5 * ctx.sigma * ctx.sigma) * T)) * (1.0 / vs);
    const Jet d2 = d1 - vs;
    return ctx.spot1 * norm_cdf(d1) - std::exp(-ctx.rate * T) * (k * norm_cdf(d2));
}

/// l-th derivative of C at y: closed forms for l <= 2, jets above.
inline double cond_price_derivative(const SpreadContext& ctx, double y, int l) {
    switch (l) {
        case 0: return cond_price(ctx, y);
        case 1: return d1_c(ctx, y);
        case 2: return d2_c(ctx, y);
        default: return cond_price_jet(ctx, y, l).derivative(l);
    }
}

/// Conditional pricing kernel for a basket of any dimension d >= 2. Given
/// Y~ = y (the last d - 1 log-returns) the basket is w1 times a call on asset
/// 1 struck at K(y) = (1/w1) e^{(r - sigma^2/2) T - mu(y)} (K - sum_j w_j S_j e^{y_j}).
struct BasketContext {
    double spot1 = 0.0;
    double w1 = 1.0;
    double strike = 0.0;
    Eigen::VectorXd other_weights;  // w_2..w_d
    Eigen::VectorXd other_spots;    // S_2..S_d
    double rate = 0.0;
    double maturity = 1.0;

    ConditionalLaw cond;
    double sigma = 0.0;  // annualized conditional volatility of Y1
    Eigen::VectorXd rest_mean;
    Eigen::MatrixXd rest_cov;

    /// log of exp(-(r - sigma^2/2) T + intercept); the full tilt weight is
    /// exp(log_tilt + slope' y).
    double log_tilt() const { return -(rate - 0.5 * sigma * sigma) * maturity + cond.intercept; }

    Eigen::Index rest_dim() const { return other_spots.size(); }
};

inline BasketContext make_basket_context(const MarketModel& model, const BasketContract& contract) {
    validate(model);
    validate(contract, model.dim());
    const Eigen::Index m = model.dim() - 1;
    const TerminalLaw law = terminal_law(model);

    BasketContext ctx;
    ctx.spot1 = model.spots(0);
    ctx.w1 = contract.weights(0);
    ctx.strike = contract.strike;
    ctx.other_weights = contract.weights.tail(m);
    ctx.other_spots = model.spots.tail(m);
    ctx.rate = model.rate;
    ctx.maturity = model.maturity;
    ctx.cond = condition_first(law);
    ctx.sigma = ctx.cond.cond_vol / std::sqrt(model.maturity);
    ctx.rest_mean = law.mean.tail(m);
    ctx.rest_cov = law.cov.bottomRightCorner(m, m);
    if (!(ctx.sigma > 0.0)) {
        throw PricingError(ErrorCode::SingularConditioning, "corr", "conditional volatility of asset 1 vanishes");
    }
    return ctx;
}

inline double conditional_strike(const BasketContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const double residual = ctx.strike - ctx.other_weights.dot((ctx.other_spots.array() * y.array().exp()).matrix());
    const double T = ctx.maturity;
    return std::exp((ctx.rate - 0.5 * ctx.sigma * ctx.sigma) * T - ctx.cond.mean_given(y)) * residual / ctx.w1;
}

inline double cond_price(const BasketContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& y) {
    return bs_call(ctx.spot1, conditional_strike(ctx, y), ctx.sigma, ctx.rate, ctx.maturity);
}

/// Value, gradient and Hessian of C at y, by the chain rule through K(y)
/// and the strike sensitivities of the Black-Scholes call.
struct PriceDerivatives {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

inline PriceDerivatives cond_price_derivatives(const BasketContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const double T = ctx.maturity;
    const double k = conditional_strike(ctx, y);
    if (!(k > 0.0)) {
        throw PricingError(ErrorCode::NonpositiveStrike, "y",
                           "conditional strike is not positive; the price derivative is undefined here");
    }
    const Eigen::VectorXd& s = ctx.cond.slope;
    const double prefactor = std::exp((ctx.rate - 0.5 * ctx.sigma * ctx.sigma) * T - ctx.cond.mean_given(y)) / ctx.w1;
    const Eigen::VectorXd h = -(ctx.other_weights.array() * ctx.other_spots.array() * y.array().exp()).matrix();
    const double g = ctx.strike + h.sum();  // K - sum_j w_j S_j e^{y_j}

    const Eigen::VectorXd dk = prefactor * (h - s * g);
    Eigen::MatrixXd ddk = prefactor * (s * s.transpose() * g - h * s.transpose() - s * h.transpose());
    ddk.diagonal() += prefactor * h;

    const double vs = ctx.sigma * std::sqrt(T);
    const double d1 = (std::log(ctx.spot1 / k) + (ctx.rate + 0.5 * ctx.sigma * ctx.sigma) * T) / vs;
    const double d2 = d1 - vs;
    const double discount = std::exp(-ctx.rate * T);
    const double c_k = -discount * norm_cdf(d2);
    const double c_kk = discount * norm_pdf(d2) / (k * vs);

    PriceDerivatives out;
    out.value = ctx.spot1 * norm_cdf(d1) - k * discount * norm_cdf(d2);
    out.gradient = c_k * dk;
    out.hessian = c_kk * dk * dk.transpose() + c_k * ddk;
    return out;
}

}  // namespace basket_taylor
