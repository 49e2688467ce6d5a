// Prices the two-asset benchmark spread with every method in the library.

#include "basket_taylor/basket_taylor.hpp"

#include <cstdio>

int main() {
    using namespace basket_taylor;

    const MarketModel model = MarketModel::two_asset(100, 96, 0.3, 0.1, -0.3, 0.03, 1.0);
    const BasketContract spread = BasketContract::spread(1.0);
    const Eigen::VectorXd ystar = y_mean(model);

    for (int order = 0; order <= 4; ++order) {
        std::printf("taylor order %d : %.6f\n", order, price_taylor(model, spread, order, ystar).price);
    }
    const McEstimate full = mc_full(model, spread, 1'000'000, 1);
    const McEstimate partial = mc_partial(model, spread, 1'000'000, 1);
    std::printf("mc full        : %.6f +- %.6f\n", full.price, full.std_error);
    std::printf("mc partial     : %.6f +- %.6f\n", partial.price, partial.std_error);

    const BasketContract exchange = BasketContract::exchange();
    std::printf("exchange exact : %.6f\n", margrabe_exact(model, exchange));
    std::printf("exchange delta : %.6f\n", approx_delta(model, exchange, 2, ystar, 0));
    return 0;
}
