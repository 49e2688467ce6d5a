#include "basket_taylor/monte_carlo.hpp"
#include "basket_taylor/taylor_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace basket_taylor;

namespace {

MarketModel benchmark(double rho, double s1 = 100, double s2 = 96) {
    return MarketModel::two_asset(s1, s2, 0.3, 0.1, rho, 0.03, 1.0);
}

MarketModel crack_model() {
    return MarketModel::uniform_corr(Eigen::Vector3d(100, 100, 80), Eigen::Vector3d(0.3, 0.25, 0.2), 0.4, 0.03, 1.0);
}

Eigen::VectorXd point(double y) { return Eigen::VectorXd::Constant(1, y); }

}  // namespace

TEST(SpreadTaylor, CorrelationTable) {
    struct Row {
        double rho, first, second;
    };
    const Row rows[] = {{0.3, 12.7889, 12.7901}, {-0.3, 13.6063, 15.0065}, {0.5, 11.8085, 11.9646}, {-0.5, 13.2767, 15.9238}};
    for (const Row& r : rows) {
        const BasketContract c = BasketContract::spread(1.0);
        EXPECT_NEAR(price_spread_taylor(benchmark(r.rho), c, 1, 0.0).price, r.first, 5e-4) << r.rho;
        EXPECT_NEAR(price_spread_taylor(benchmark(r.rho), c, 2, 0.0).price, r.second, 5e-4) << r.rho;
    }
}

TEST(SpreadTaylor, ExpansionPointTable) {
    struct Row {
        double ystar, first, second;
    };
    const Row rows[] = {{-0.015, 12.3734, 16.3011}, {-0.02, 12.2966, 15.8566}, {-0.05, 11.8434, 12.9761},
                        {0.0, 12.5208, 17.5217},    {0.01, 12.5089, 18.2168}};
    double lo = INFINITY, hi = -INFINITY;
    for (const Row& r : rows) {
        const BasketContract c = BasketContract::spread(1.0);
        EXPECT_NEAR(price_spread_taylor(benchmark(-0.7), c, 1, r.ystar).price, r.first, 5e-4) << r.ystar;
        const double second = price_spread_taylor(benchmark(-0.7), c, 2, r.ystar).price;
        EXPECT_NEAR(second, r.second, 5e-4) << r.ystar;
        lo = std::min(lo, second);
        hi = std::max(hi, second);
    }
    // The truncated price depends on where the expansion is taken.
    EXPECT_GT(hi - lo, 1.0);
}

TEST(SpreadTaylor, OutOfTheMoneyTable) {
    struct Row {
        double s2, strike, ystar, first, second;
    };
    const Row rows[] = {{100, 5, 0.065, 5.30281, 7.0468998},
                        {110, 5, 0.037, 3.442070, 4.800319},
                        {100, 10, 0.05, 4.3248347, 5.7726138},
                        {110, 10, 0.03, 2.71934, 3.89966}};
    for (const Row& r : rows) {
        const MarketModel m = benchmark(-0.3, 90, r.s2);
        const BasketContract c = BasketContract::spread(r.strike);
        EXPECT_NEAR(price_spread_taylor(m, c, 1, r.ystar).price, r.first, 5e-4);
        EXPECT_NEAR(price_spread_taylor(m, c, 2, r.ystar).price, r.second, 2e-3);
    }
}

TEST(SpreadTaylor, ZerothOrderIsTheConditionalPrice) {
    const SpreadContext ctx = make_spread_context(benchmark(-0.3), BasketContract::spread(1.0));
    EXPECT_EQ(price_spread_taylor(ctx, 0, 0.0).price, cond_price(ctx, 0.0));
    EXPECT_NEAR(price_spread_taylor(ctx, 0, 0.0).price, 15.150723522025504, 1e-10);
}

TEST(SpreadTaylor, ClosedFormsEqualTheGeneralSum) {
    std::mt19937_64 rng(21);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (int i = 0; i < 20; ++i) {
        const MarketModel m = MarketModel::two_asset(u(80, 120), u(80, 120), u(0.1, 0.5), u(0.05, 0.4), u(-0.9, 0.9),
                                                     u(0.0, 0.05), u(0.25, 2.0));
        const SpreadContext ctx = make_spread_context(m, BasketContract::spread(u(0, 10)));
        const double ystar = u(-0.1, 0.1);
        const auto [p1, p2] = price_spread_closed12(ctx, ystar);
        EXPECT_NEAR(p1, price_spread_taylor(ctx, 1, ystar).price, 1e-10 * std::max(1.0, std::abs(p1)));
        EXPECT_NEAR(p2, price_spread_taylor(ctx, 2, ystar).price, 1e-10 * std::max(1.0, std::abs(p2)));
    }
}

TEST(SpreadTaylor, ExpectationFactors) {
    const SpreadContext ctx = make_spread_context(benchmark(-0.3), BasketContract::spread(1.0));
    const double a = 0.3 * -0.3;
    EXPECT_EQ(e_of_m(ctx, 0), 1.0);
    EXPECT_NEAR(e_of_m(ctx, 1), a, 1e-15);
    EXPECT_NEAR(e_of_m(ctx, 2), a * a + 1.0, 1e-15);
    EXPECT_NEAR(e_of_m(ctx, 3), a * a * a + 3 * a, 1e-15);
    EXPECT_THROW(e_of_m(ctx, -1), PricingError);
}

TEST(SpreadTaylor, HigherOrdersExtendLowerOnes) {
    const SpreadContext ctx = make_spread_context(benchmark(-0.5), BasketContract::spread(1.0));
    const TaylorQuote top = price_spread_taylor(ctx, kSpreadOrderCap, 0.025);
    ASSERT_EQ(top.terms.size(), static_cast<std::size_t>(kSpreadOrderCap) + 1);
    for (int n = 0; n < kSpreadOrderCap; ++n) {
        const TaylorQuote q = price_spread_taylor(ctx, n, 0.025);
        for (int l = 0; l <= n; ++l) EXPECT_EQ(q.terms[static_cast<std::size_t>(l)], top.terms[static_cast<std::size_t>(l)]);
    }
    try {
        price_spread_taylor(ctx, kSpreadOrderCap + 1, 0.0);
        FAIL();
    } catch (const PricingError& e) {
        EXPECT_EQ(e.code(), ErrorCode::OrderCapExceeded);
    }
}

TEST(SpreadTaylor, ScalingHomogeneity) {
    const BasketContract c = BasketContract::spread(1.0);
    for (double lambda : {0.01, 0.5, 3.0, 250.0}) {
        BasketContract cl = c;
        cl.strike *= lambda;
        for (int n = 0; n <= 4; ++n) {
            const double base = price_spread_taylor(benchmark(-0.3), c, n, 0.02).price;
            const double scaled = price_spread_taylor(benchmark(-0.3, 100 * lambda, 96 * lambda), cl, n, 0.02).price;
            EXPECT_NEAR(scaled / (lambda * base), 1.0, 1e-10);
        }
    }
}

TEST(YMean, Formulas) {
    EXPECT_NEAR(y_mean(benchmark(-0.3))(0), 0.025, 1e-15);
    EXPECT_NEAR(y_mean(MarketModel::two_asset(1, 1, 0.2, 0.2, 0.0, 0.02, 1.0))(0), 0.0, 1e-15);
    const Eigen::VectorXd y = y_mean(crack_model());
    ASSERT_EQ(y.size(), 2);
    EXPECT_NEAR(y(0), 0.03 - 0.5 * 0.0625, 1e-15);
    EXPECT_NEAR(y(1), 0.03 - 0.5 * 0.04, 1e-15);
}

TEST(BasketTaylor, ReducesToTheSpreadKernelForTwoAssets) {
    std::mt19937_64 rng(22);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (int i = 0; i < 20; ++i) {
        const MarketModel m = MarketModel::two_asset(u(80, 120), u(80, 120), u(0.1, 0.5), u(0.05, 0.4), u(-0.9, 0.9),
                                                     u(0.0, 0.05), u(0.25, 2.0));
        BasketContract c;
        c.weights = Eigen::Vector2d(u(0.5, 2.0), -u(0.5, 2.0));
        c.strike = u(0, 10);
        const double ystar = u(-0.1, 0.1);
        for (int n = 0; n <= 2; ++n) {
            const double spread = price_spread_taylor(m, c, n, ystar).price;
            const double basket = price_basket_taylor(m, c, n, point(ystar)).price;
            EXPECT_NEAR(basket, spread, 1e-9 * std::max(1.0, std::abs(spread))) << i << " n=" << n;
        }
    }
}

TEST(BasketTaylor, CrackSpreadAgreesWithMonteCarlo) {
    const MarketModel m = crack_model();
    const BasketContract c = BasketContract::crack_spread(5.0);
    const TaylorQuote q = price_taylor(m, c, 2, y_mean(m));
    const McEstimate mc = mc_full(m, c, 10'000'000, 7);
    EXPECT_LE(std::abs(q.price - mc.price), 3.0 * mc.std_error) << q.price << " vs " << mc.price << " +- " << mc.std_error;
    EXPECT_GT(q.price, 0.0);
}

TEST(BasketTaylor, Guards) {
    const MarketModel m = crack_model();
    const BasketContract c = BasketContract::crack_spread(5.0);
    EXPECT_THROW(price_basket_taylor(m, c, 3, y_mean(m)), PricingError);
    EXPECT_THROW(price_basket_taylor(m, c, 2, point(0.0)), PricingError);
    EXPECT_THROW(price_taylor(benchmark(0.3), BasketContract::spread(1.0), 2, Eigen::Vector2d(0, 0)), PricingError);
}

TEST(Delta, SignsAndExchangeLimit) {
    const MarketModel m = benchmark(-0.3);
    const BasketContract c = BasketContract::spread(1.0);
    const Eigen::VectorXd y = y_mean(m);
    EXPECT_GT(approx_delta(m, c, 2, y, 0), 0.0);
    EXPECT_LT(approx_delta(m, c, 2, y, 1), 0.0);
    EXPECT_THROW(approx_delta(m, c, 2, y, 2), PricingError);

    const BasketContract ex = BasketContract::exchange();
    const double vs = std::sqrt(0.09 + 0.01 + 2 * 0.3 * 0.3 * 0.1);
    const double d1 = (std::log(100.0 / 96.0) + 0.5 * vs * vs) / vs;
    EXPECT_NEAR(approx_delta(m, ex, 2, y, 0), norm_cdf(d1), 1e-2);
}

TEST(Margrabe, LimitsAndGuards) {
    const BasketContract ex = BasketContract::exchange();
    // A nearly deterministic second asset turns the exchange option into a call struck at S2 e^{rT}.
    const MarketModel m = MarketModel::two_asset(100, 96, 0.3, 1e-9, 0.2, 0.03, 1.0);
    EXPECT_NEAR(margrabe_exact(m, ex), bs_call(100, 96 * std::exp(0.03), 0.3, 0.03, 1.0), 1e-6);
    // Swapping the legs is put-call parity: E - E' = S1 - S2.
    const double e = margrabe_exact(benchmark(-0.3), ex);
    const double swapped = margrabe_exact(MarketModel::two_asset(96, 100, 0.1, 0.3, -0.3, 0.03, 1.0), ex);
    EXPECT_NEAR(e - swapped, 4.0, 1e-12);

    EXPECT_THROW(margrabe_exact(benchmark(-0.3), BasketContract::spread(1.0)), PricingError);
    BasketContract both_long;
    both_long.weights = Eigen::Vector2d(1.0, 1.0);
    both_long.strike = 0.0;
    EXPECT_THROW(margrabe_exact(benchmark(-0.3), both_long), PricingError);
}
