#pragma once

#include "basket_taylor/error.hpp"
#include "basket_taylor/gaussian_moments.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace basket_taylor {

/// Multivariate Black-Scholes market: each log-return Y_i over [0, T] is
/// N((r - vol_i^2 / 2) T, vol_i^2 T) with pairwise correlation corr(i, j).
struct MarketModel {
    Eigen::VectorXd spots;
    Eigen::VectorXd vols;
    Eigen::MatrixXd corr;
    double rate = 0.0;
    double maturity = 1.0;

    Eigen::Index dim() const { return spots.size(); }

    static MarketModel two_asset(double spot1, double spot2, double vol1, double vol2, double rho, double rate,
                                 double maturity) {
        MarketModel m;
        m.spots = Eigen::Vector2d(spot1, spot2);
        m.vols = Eigen::Vector2d(vol1, vol2);
        m.corr = Eigen::Matrix2d{{1.0, rho}, {rho, 1.0}};
        m.rate = rate;
        m.maturity = maturity;
        return m;
    }

    /// d assets sharing one pairwise correlation.
    static MarketModel uniform_corr(Eigen::VectorXd spots, Eigen::VectorXd vols, double rho, double rate,
                                    double maturity) {
        MarketModel m;
        const Eigen::Index d = spots.size();
        m.spots = std::move(spots);
        m.vols = std::move(vols);
        m.corr = Eigen::MatrixXd::Constant(d, d, rho);
        m.corr.diagonal().setOnes();
        m.rate = rate;
        m.maturity = maturity;
        return m;
    }
};

/// Payoff (sum_j w_j S_T^j - K)_+.
struct BasketContract {
    Eigen::VectorXd weights;
    double strike = 0.0;

    static BasketContract spread(double strike) { return {Eigen::Vector2d(1.0, -1.0), strike}; }
    static BasketContract exchange() { return spread(0.0); }
    /// 3:2:1 crack spread on (gasoline, heating oil, crude).
    static BasketContract crack_spread(double strike) {
        return {Eigen::Vector3d(2.0 / 3.0, -1.0 / 3.0, -1.0), strike};
    }
};

/// Exact law of the terminal log-returns.
struct TerminalLaw {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

namespace detail {

inline std::string indexed(const char* name, Eigen::Index i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

inline std::string indexed(const char* name, Eigen::Index i, Eigen::Index j) {
    return indexed(name, i) + "[" + std::to_string(j) + "]";
}

}  // namespace detail

inline void validate(const MarketModel& model) {
    using detail::indexed;
    const Eigen::Index d = model.spots.size();
    if (d < 2) throw PricingError(ErrorCode::InvalidArgument, "spots", "at least two assets are required");
    if (model.vols.size() != d) throw PricingError(ErrorCode::InvalidArgument, "vols", "length differs from spots");
    if (model.corr.rows() != d || model.corr.cols() != d) {
        throw PricingError(ErrorCode::InvalidArgument, "corr", "must be a d x d matrix");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(model.spots(i) > 0.0) || !std::isfinite(model.spots(i))) {
            throw PricingError(ErrorCode::NonPositiveInput, indexed("spots", i), "spot must be positive");
        }
        if (!(model.vols(i) > 0.0) || !std::isfinite(model.vols(i))) {
            throw PricingError(ErrorCode::NonPositiveInput, indexed("vols", i), "volatility must be positive");
        }
    }
    if (!(model.maturity > 0.0) || !std::isfinite(model.maturity)) {
        throw PricingError(ErrorCode::NonPositiveInput, "maturity", "maturity must be positive");
    }
    if (!std::isfinite(model.rate)) throw PricingError(ErrorCode::InvalidArgument, "rate", "rate must be finite");

    for (Eigen::Index i = 0; i < d; ++i) {
        if (model.corr(i, i) != 1.0) {
            throw PricingError(ErrorCode::NotPositiveDefinite, indexed("corr", i, i), "diagonal must be 1");
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            const double c = model.corr(i, j);
            if (!(c >= -1.0 && c <= 1.0)) {
                throw PricingError(ErrorCode::NotPositiveDefinite, indexed("corr", i, j), "entry outside [-1, 1]");
            }
            if (c != model.corr(j, i)) {
                throw PricingError(ErrorCode::NotPositiveDefinite, indexed("corr", i, j), "matrix is not symmetric");
            }
        }
    }
    try {
        cholesky(model.corr);
    } catch (const PricingError&) {
        throw PricingError(ErrorCode::NotPositiveDefinite, "corr", "correlation matrix is not positive definite");
    }
}

inline void validate(const BasketContract& contract, Eigen::Index dim) {
    if (contract.weights.size() != dim) {
        throw PricingError(ErrorCode::InvalidArgument, "weights", "length differs from the number of assets");
    }
    if (!(contract.weights(0) > 0.0)) {
        throw PricingError(ErrorCode::InvalidArgument, "weights[0]", "first weight must be positive");
    }
    if (!contract.weights.allFinite() || !std::isfinite(contract.strike)) {
        throw PricingError(ErrorCode::InvalidArgument, "weights", "weights and strike must be finite");
    }
}

inline TerminalLaw terminal_law(const MarketModel& model) {
    validate(model);
    const double T = model.maturity;
    TerminalLaw law;
    law.mean = (model.rate - 0.5 * model.vols.array().square()).matrix() * T;
    law.cov = model.vols.asDiagonal() * model.corr * model.vols.asDiagonal();
    law.cov *= T;
    // Keep exact symmetry for downstream factorizations.
    law.cov = 0.5 * (law.cov + law.cov.transpose()).eval();
    return law;
}

inline ConditionalLaw condition_first(const TerminalLaw& law) { return condition_first(law.mean, law.cov); }

inline double payoff(const BasketContract& contract, const Eigen::Ref<const Eigen::VectorXd>& terminal_spots) {
    if (terminal_spots.size() != contract.weights.size()) {
        throw PricingError(ErrorCode::InvalidArgument, "terminal_spots", "length differs from weights");
    }
    return std::max(contract.weights.dot(terminal_spots) - contract.strike, 0.0);
}

}  // namespace basket_taylor
