// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "basket_taylor/basket_taylor.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace basket_taylor;

namespace {

int failures = 0;

void report(bool ok, int id, const std::string& what, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("%s %d  %s  [%s]\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

MarketModel benchmark(double rho, double s1 = 100, double s2 = 96) {
    return MarketModel::two_asset(s1, s2, 0.3, 0.1, rho, 0.03, 1.0);
}

constexpr std::uint64_t kSeed = 20140101;
constexpr std::uint64_t kPaths = 1'000'000;

void table1_taylor() {
    const double rho[] = {0.3, -0.3, 0.5, -0.5};
    const double first[] = {12.7889, 13.6063, 11.8085, 13.2767};
    const double second[] = {12.7901, 15.0065, 11.9646, 15.9238};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        const BasketContract c = BasketContract::spread(1.0);
        worst = std::max(worst, std::abs(price_spread_taylor(benchmark(rho[i]), c, 1, 0.0).price - first[i]));
        worst = std::max(worst, std::abs(price_spread_taylor(benchmark(rho[i]), c, 2, 0.0).price - second[i]));
    }
    report(worst <= 5e-4, 1, "Table 1 Taylor columns within 5e-4", fmt("max abs err %.2e", worst));
}

void table1_mc() {
    const double rho[] = {0.3, -0.3, 0.5, -0.5};
    const double full[] = {12.7843, 14.9734, 11.9525, 15.6273};
    const double partial[] = {12.7907, 14.9826, 11.9544, 15.6302};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        const BasketContract c = BasketContract::spread(1.0);
        const McEstimate f = mc_full(benchmark(rho[i]), c, kPaths, kSeed);
        const McEstimate p = mc_partial(benchmark(rho[i]), c, kPaths, kSeed);
        worst = std::max(worst, std::abs(f.price - full[i]) / f.std_error);
        worst = std::max(worst, std::abs(p.price - partial[i]) / p.std_error);
    }
    report(worst <= 3.0, 2, "Table 1 full and partial MC (n=1e6) within 3 stderr", fmt("max |z| %.2f", worst));
}

void table2() {
    const double ystar[] = {-0.015, -0.02, -0.05, 0.0, 0.01};
    const double first[] = {12.3734, 12.2966, 11.8434, 12.5208, 12.5089};
    const double second[] = {16.3011, 15.8566, 12.9761, 17.5217, 18.2168};
    const MarketModel m = benchmark(-0.7);
    const BasketContract c = BasketContract::spread(1.0);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        worst = std::max(worst, std::abs(price_spread_taylor(m, c, 1, ystar[i]).price - first[i]));
        worst = std::max(worst, std::abs(price_spread_taylor(m, c, 2, ystar[i]).price - second[i]));
    }
    const McEstimate f = mc_full(m, c, kPaths, kSeed);
    const McEstimate p = mc_partial(m, c, kPaths, kSeed);
    const double zf = std::abs(f.price - 16.2463) / f.std_error;
    const double zp = std::abs(p.price - 16.2540) / p.std_error;
    report(worst <= 5e-4 && zf <= 3.0 && zp <= 3.0, 3, "Table 2 Taylor within 5e-4, MC (n=1e6) within 3 stderr",
           fmt("max abs err %.2e, ", worst) + fmt("|z| full %.2f partial %.2f", zf, zp));
}

void table3() {
    const double s2[] = {100, 110, 100, 110};
    const double strike[] = {5, 5, 10, 10};
    const double ystar[] = {0.065, 0.037, 0.05, 0.03};
    const double first[] = {5.30281, 3.442070, 4.3248347, 2.71934};
    const double second[] = {7.0468998, 4.800319, 5.7726138, 3.89966};
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const MarketModel m = benchmark(-0.3, 90, s2[i]);
        const BasketContract c = BasketContract::spread(strike[i]);
        worst1 = std::max(worst1, std::abs(price_spread_taylor(m, c, 1, ystar[i]).price - first[i]));
        worst2 = std::max(worst2, std::abs(price_spread_taylor(m, c, 2, ystar[i]).price - second[i]));
    }
    report(worst1 <= 5e-4 && worst2 <= 2e-3, 4, "Table 3 first order within 5e-4, second order within 2e-3",
           fmt("max abs err first %.2e second %.2e", worst1, worst2));
}

void margrabe_oracle() {
    std::mt19937_64 rng(5);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const MarketModel m = MarketModel::two_asset(100, 96, u(0.05, 0.6), u(0.05, 0.6), u(-0.8, 0.8), 0.03, 1.0);
        const BasketContract ex = BasketContract::exchange();
        const McEstimate e = mc_full(m, ex, kPaths, kSeed + static_cast<std::uint64_t>(i));
        worst = std::max(worst, std::abs(e.price - margrabe_exact(m, ex)) / e.std_error);
    }
    report(worst <= 3.0, 5, "Exchange option: full MC (n=1e6) vs Margrabe within 3 stderr, 10 draws",
           fmt("max |z| %.2f", worst));
}

void derivatives() {
    std::mt19937_64 rng(6);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    double worst = 0.0;
    for (int set = 0; set < 10; ++set) {
        const MarketModel m = MarketModel::two_asset(u(80, 120), u(80, 120), u(0.1, 0.5), u(0.05, 0.4), u(-0.9, 0.9),
                                                     u(0.0, 0.05), u(0.25, 2.0));
        const SpreadContext ctx = make_spread_context(m, BasketContract::spread(u(0.0, 20.0)));
        const double center = y_mean(m)(0);
        const double spread = 3.0 * m.vols(1) * std::sqrt(m.maturity);
        for (int i = 0; i <= 20; ++i) {
            const double y = center - spread + 2.0 * spread * i / 20.0;
            const double h = 1e-5;
            const double fd1 = (cond_price(ctx, y + h) - cond_price(ctx, y - h)) / (2 * h);
            const double fd2 = (d1_c(ctx, y + h) - d1_c(ctx, y - h)) / (2 * h);
            // Relative error, with derivatives below 1e-2 in magnitude measured against 1e-2.
            worst = std::max(worst, std::abs(d1_c(ctx, y) - fd1) / std::max(std::abs(fd1), 1e-2));
            worst = std::max(worst, std::abs(d2_c(ctx, y) - fd2) / std::max(std::abs(fd2), 1e-2));
        }
    }
    report(worst <= 1e-6, 6, "D1C and D2C vs central differences, 21 points x 10 sets, rel err 1e-6",
           fmt("max rel err %.2e", worst));
}

double trapezoid_exp_power(double a, int m) {
    // The integrand is smooth and decays like a Gaussian, so the trapezoid rule converges geometrically.
    const double h = 0.005;
    double sum = 0.0;
    for (int i = -8000; i <= 8000; ++i) {
        const double z = i * h;
        sum += std::exp(a * z) * std::pow(z, m) * norm_pdf(z);
    }
    return sum * h;
}

void moments() {
    double worst_q = 0.0;
    for (double a : {-1.0, -0.3, 0.0, 0.5, 2.0}) {
        for (int m = 0; m <= 6; ++m) {
            const double q = trapezoid_exp_power(a, m);
            const double got = exp_power_moment(a, m);
            worst_q = std::max(worst_q, std::abs(got - q) / std::max(std::abs(q), 1.0));
        }
    }

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> z;
    double worst_z = 0.0;
    for (int dim : {2, 2, 3, 3}) {
        Eigen::MatrixXd a(dim, dim);
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = 0.3 * u(rng);
        const Eigen::MatrixXd cov = a * a.transpose() + 0.01 * Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd mean(dim), tilt(dim), ystar(dim);
        for (int k = 0; k < dim; ++k) {
            mean(k) = 0.05 * u(rng);
            tilt(k) = u(rng);
            ystar(k) = 0.1 * u(rng);
        }
        const Eigen::MatrixXd lower = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

        std::vector<MultiIndex> indices;
        for (int l = 0; l <= 4; ++l) {
            for (auto& idx : MultiIndex::of_total(static_cast<std::size_t>(dim), l)) indices.push_back(idx);
        }
        std::vector<double> sum(indices.size(), 0.0), sum_sq(indices.size(), 0.0);
        const int n = 10'000'000;
        Eigen::VectorXd g(dim);
        std::vector<std::array<double, 5>> pow(static_cast<std::size_t>(dim));
        for (int s = 0; s < n; ++s) {
            for (int k = 0; k < dim; ++k) g(k) = z(rng);
            const Eigen::VectorXd w = mean + lower * g;
            const double weight = std::exp(tilt.dot(w));
            for (int k = 0; k < dim; ++k) {
                auto& p = pow[static_cast<std::size_t>(k)];
                p[0] = 1.0;
                for (int e = 1; e <= 4; ++e) p[static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(e) - 1] * (w(k) - ystar(k));
            }
            for (std::size_t i = 0; i < indices.size(); ++i) {
                double v = weight;
                for (int k = 0; k < dim; ++k) v *= pow[static_cast<std::size_t>(k)][static_cast<std::size_t>(indices[i][static_cast<std::size_t>(k)])];
                sum[i] += v;
                sum_sq[i] += v * v;
            }
        }
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const double est = sum[i] / n;
            const double se = std::sqrt((sum_sq[i] / n - est * est) / n);
            const double exact = mixed_exp_power_moment(mean, cov, tilt, ystar, indices[i]);
            worst_z = std::max(worst_z, std::abs(exact - est) / se);
        }
    }
    report(worst_q <= 1e-10 && worst_z <= 4.0, 7,
           "exp_power_moment vs quadrature (1e-10); mixed moments vs 1e7-sample MC within 4 stderr",
           fmt("max rel err %.2e, ", worst_q) + fmt("max |z| %.2f", worst_z));
}

void reduction_and_determinism() {
    std::mt19937_64 rng(8);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const MarketModel m = MarketModel::two_asset(u(80, 120), u(80, 120), u(0.1, 0.5), u(0.05, 0.4), u(-0.9, 0.9),
                                                     u(0.0, 0.05), u(0.25, 2.0));
        const BasketContract c = BasketContract::spread(u(0.0, 10.0));
        const double ystar = u(-0.1, 0.1);
        for (int n = 0; n <= 2; ++n) {
            const double a = price_spread_taylor(m, c, n, ystar).price;
            const double b = price_basket_taylor(m, c, n, Eigen::VectorXd::Constant(1, ystar)).price;
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
    }
    const MarketModel m = benchmark(-0.3);
    const BasketContract c = BasketContract::spread(1.0);
    bool identical = true;
    const McEstimate f1 = mc_full(m, c, kPaths, kSeed, 1);
    const McEstimate p1 = mc_partial(m, c, kPaths, kSeed, 1);
    for (unsigned chunks : {2u, 8u}) {
        identical = identical && mc_full(m, c, kPaths, kSeed, chunks) == f1;
        identical = identical && mc_partial(m, c, kPaths, kSeed, chunks) == p1;
    }
    report(worst <= 1e-9 && identical, 8, "d=2 basket kernel equals spread kernel (1e-9); MC bit-identical over 1/2/8 chunks",
           fmt("max rel diff %.2e, ", worst) + (identical ? "identical" : "MISMATCH"));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    table1_taylor();
    table1_mc();
    table2();
    table3();
    margrabe_oracle();
    derivatives();
    moments();
    reduction_and_determinism();
    std::printf("INFO 9  blanket relative-error claim of 1e-4 is not an acceptance bound; criteria 1-4 stand in for it\n");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %d failing criteria, %.1f s\n", failures == 0 ? "ALL PASS" : "FAILURES", failures, secs);
    return failures == 0 ? 0 : 1;
}
