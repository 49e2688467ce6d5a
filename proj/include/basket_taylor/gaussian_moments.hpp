#pragma once

// Gaussian analytics used by the Taylor expansions: the standard normal
// distribution, double factorials, univariate exponential-power moments,
// Cholesky factorization, Gaussian conditioning and mixed
// exponential-power moments of a multivariate normal.

#include "basket_taylor/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace basket_taylor {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF. erfc keeps the lower tail accurate in relative terms.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

/// Inverse standard normal CDF (Wichura, AS 241 PPND16), relative accuracy
/// about 1e-16 on (0, 1). Returns +/-infinity at the endpoints.
inline double norm_inv_cdf(double p) {
    if (!(p > 0.0)) return p == 0.0 ? -INFINITY : NAN;
    if (!(p < 1.0)) return p == 1.0 ? INFINITY : NAN;

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            ((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608;
        const double den =
            ((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0;
        return q * num / den;
    }

    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
             4.6303378461565452959) * r + 1.42343711074968357734;
        const double den =
            ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
             2.05319162663775882187) * r + 1.0;
        x = num / den;
    } else {
        r -= 5.0;
        const double num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
             5.4637849111641143699) * r + 6.6579046435011037772;
        const double den =
            ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
             0.59983220655588793769) * r + 1.0;
        x = num / den;
    }
    return q < 0.0 ? -x : x;
}

/// n!! for odd n >= -1; (-1)!! = 1.
inline std::uint64_t double_factorial(int n) {
    if (n < -1 || (n != -1 && n % 2 == 0)) {
        throw PricingError(ErrorCode::InvalidArgument, "n", "double factorial needs an odd n >= -1");
    }
    std::uint64_t out = 1;
    for (int k = n; k > 1; k -= 2) out *= static_cast<std::uint64_t>(k);
    return out;
}

/// E[Z^nu] for Z ~ N(0,1).
inline double std_normal_moment(int nu) {
    if (nu < 0) throw PricingError(ErrorCode::InvalidArgument, "nu", "moment order must be >= 0");
    if (nu % 2 != 0) return 0.0;
    return static_cast<double>(double_factorial(nu - 1));
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(out);
}

/// E[e^{aZ} Z^m] = e^{a^2/2} sum_{nu <= m/2} C(m, 2nu) a^{m-2nu} (2nu-1)!!.
inline double exp_power_moment(double a, int m) {
    if (m < 0) throw PricingError(ErrorCode::InvalidArgument, "m", "moment order must be >= 0");
    double sum = 0.0;
    for (int nu = 0; 2 * nu <= m; ++nu) {
        sum += binomial(m, 2 * nu) * std::pow(a, m - 2 * nu) * static_cast<double>(double_factorial(2 * nu - 1));
    }
    return std::exp(0.5 * a * a) * sum;
}

/// Lower Cholesky factor L with L L' = cov.
inline Eigen::MatrixXd cholesky(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) {
        throw PricingError(ErrorCode::InvalidArgument, "cov", "covariance must be square and non-empty");
    }
    if (!cov.isApprox(cov.transpose(), 1e-12)) {
        throw PricingError(ErrorCode::NotPositiveDefinite, "cov", "matrix is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw PricingError(ErrorCode::NotPositiveDefinite, "cov", "Cholesky factorization failed");
    }
    Eigen::MatrixXd lower = llt.matrixL();
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) {
            throw PricingError(ErrorCode::NotPositiveDefinite, "cov", "Cholesky pivot is not positive");
        }
    }
    return lower;
}

/// Law of the first component of a Gaussian vector given the remaining ones:
/// Y1 | Y~ = y  ~  N(intercept + slope' y, cond_vol^2).
/// `cond_vol` is the conditional standard deviation over the whole horizon
/// (not annualized); divide by sqrt(T) for a Black-Scholes volatility.
struct ConditionalLaw {
    double intercept = 0.0;
    Eigen::VectorXd slope;
    double cond_vol = 0.0;

    double mean_given(const Eigen::Ref<const Eigen::VectorXd>& y) const { return intercept + slope.dot(y); }
};

/// Gaussian conditioning of component 0 on components 1..d-1.
inline ConditionalLaw condition_first(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    const Eigen::Index d = mean.size();
    if (d < 2 || cov.rows() != d || cov.cols() != d) {
        throw PricingError(ErrorCode::InvalidArgument, "cov", "conditioning needs d >= 2 and a d x d covariance");
    }
    const Eigen::Index m = d - 1;
    const Eigen::MatrixXd cov_rest = cov.bottomRightCorner(m, m);
    const Eigen::VectorXd cov_cross = cov.block(1, 0, m, 1);

    Eigen::LLT<Eigen::MatrixXd> llt(cov_rest);
    if (llt.info() != Eigen::Success) {
        throw PricingError(ErrorCode::SingularConditioning, "cov", "covariance of the conditioning block is singular");
    }

    ConditionalLaw law;
    law.slope = llt.solve(cov_cross);
    law.intercept = mean(0) - law.slope.dot(mean.tail(m));
    const double var = cov(0, 0) - law.slope.dot(cov_cross);
    // Rounding can push a perfectly correlated case a hair below zero.
    law.cond_vol = std::sqrt(std::max(var, 0.0));
    return law;
}

/// Multi-index L = (l_1, ..., l_{d-1}) with total order |L|.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> orders) : orders_(std::move(orders)) {
        for (int l : orders_) {
            if (l < 0) throw PricingError(ErrorCode::InvalidArgument, "L", "multi-index entries must be >= 0");
        }
        total_ = std::accumulate(orders_.begin(), orders_.end(), 0);
    }

    static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }

    std::size_t size() const { return orders_.size(); }
    int operator[](std::size_t k) const { return orders_[k]; }
    int total() const { return total_; }
    const std::vector<int>& orders() const { return orders_; }

    /// prod_k l_k!
    double factorial_product() const {
        double out = 1.0;
        for (int l : orders_) {
            for (int i = 2; i <= l; ++i) out *= i;
        }
        return out;
    }

    /// Every multi-index of the given dimension with total order `l`.
    static std::vector<MultiIndex> of_total(std::size_t dim, int l) {
        std::vector<MultiIndex> out;
        std::vector<int> cur(dim, 0);
        auto rec = [&](auto&& self, std::size_t k, int left) -> void {
            if (k + 1 == dim) {
                cur[k] = left;
                out.emplace_back(cur);
                return;
            }
            for (int v = left; v >= 0; --v) {
                cur[k] = v;
                self(self, k + 1, left - v);
            }
        };
        if (dim > 0) rec(rec, 0, l);
        return out;
    }

private:
    std::vector<int> orders_;
    int total_ = 0;
};

inline constexpr int kMixedMomentOrderCap = 8;

namespace detail {

// Sum over perfect matchings of `idx` of prod cov(idx_a, idx_b) (Isserlis).
inline double isserlis(std::vector<int>& idx, const Eigen::MatrixXd& cov) {
    if (idx.empty()) return 1.0;
    if (idx.size() % 2 != 0) return 0.0;
    const int first = idx.back();
    idx.pop_back();
    double sum = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const int partner = idx[j];
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(j));
        sum += cov(first, partner) * isserlis(idx, cov);
        idx.insert(idx.begin() + static_cast<std::ptrdiff_t>(j), partner);
    }
    idx.push_back(first);
    return sum;
}

}  // namespace detail

/// E[prod_k X_k^{j_k}] for a centered Gaussian X with covariance `cov`,
/// by explicit enumeration of pair partitions.
inline double central_moment(const Eigen::MatrixXd& cov, const MultiIndex& powers) {
    if (powers.total() > kMixedMomentOrderCap) {
        throw PricingError(ErrorCode::OrderCapExceeded, "L", "mixed moment order above 8");
    }
    std::vector<int> idx;
    for (std::size_t k = 0; k < powers.size(); ++k) {
        for (int i = 0; i < powers[k]; ++i) idx.push_back(static_cast<int>(k));
    }
    return detail::isserlis(idx, cov);
}

/// E[exp(a'W) prod_k (W_k - ystar_k)^{l_k}] for W ~ N(mean, cov).
///
/// The exponential tilt moves W to N(mean + cov a, cov) with weight
/// exp(a'mean + a'cov a / 2); the shifted polynomial is expanded binomially
/// into centered moments.
inline double mixed_exp_power_moment(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                     const Eigen::VectorXd& a, const Eigen::VectorXd& ystar,
                                     const MultiIndex& L) {
    const Eigen::Index m = mean.size();
    if (cov.rows() != m || cov.cols() != m || a.size() != m || ystar.size() != m ||
        static_cast<Eigen::Index>(L.size()) != m) {
        throw PricingError(ErrorCode::InvalidArgument, "L", "dimension mismatch in mixed moment");
    }
    if (L.total() > kMixedMomentOrderCap) {
        throw PricingError(ErrorCode::OrderCapExceeded, "L", "mixed moment order above 8");
    }

    const Eigen::VectorXd cov_a = cov * a;
    const double weight = std::exp(a.dot(mean) + 0.5 * a.dot(cov_a));
    const Eigen::VectorXd offset = mean + cov_a - ystar;

    // Enumerate sub-indices J <= L.
    double sum = 0.0;
    std::vector<int> j(L.size(), 0);
    while (true) {
        double coeff = 1.0;
        for (std::size_t k = 0; k < L.size(); ++k) {
            coeff *= binomial(L[k], j[k]) * std::pow(offset(static_cast<Eigen::Index>(k)), L[k] - j[k]);
        }
        if (coeff != 0.0) sum += coeff * central_moment(cov, MultiIndex(j));

        std::size_t k = 0;
        while (k < j.size() && j[k] == L[k]) j[k++] = 0;
        if (k == j.size()) break;
        ++j[k];
    }
    return weight * sum;
}

}  // namespace basket_taylor
