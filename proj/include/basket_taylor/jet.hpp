#pragma once

// Truncated univariate Taylor series. A Jet of order n holds the normalized
// coefficients c_k = f^(k)(x0) / k!, k = 0..n, so arithmetic on jets yields
// exact derivatives of compositions (up to rounding) at any order.

#include "basket_taylor/gaussian_moments.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace basket_taylor {

class Jet {
public:
    Jet(int order, double value) : c_(static_cast<std::size_t>(order) + 1, 0.0) { c_[0] = value; }

    /// The identity t -> x0 + t.
    static Jet variable(int order, double x0) {
        Jet j(order, x0);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    double value() const { return c_[0]; }

    /// k-th derivative at the expansion point.
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c_[static_cast<std::size_t>(k)] * f;
    }

    Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        assert(a.c_.size() == b.c_.size());
        Jet out(a.order(), 0.0);
        for (std::size_t k = 0; k < a.c_.size(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
            out.c_[k] = s;
        }
        return out;
    }

    friend Jet exp(const Jet& a) {
        Jet out(a.order(), std::exp(a.c_[0]));
        for (std::size_t k = 1; k < a.c_.size(); ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c_[j] * out.c_[k - j];
            out.c_[k] = s / static_cast<double>(k);
        }
        return out;
    }

    friend Jet log(const Jet& a) {
        Jet out(a.order(), std::log(a.c_[0]));
        for (std::size_t k = 1; k < a.c_.size(); ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * out.c_[j] * a.c_[k - j];
            out.c_[k] = (a.c_[k] - s / static_cast<double>(k)) / a.c_[0];
        }
        return out;
    }

    /// f(a) given the normalized Taylor coefficients of f at a.value().
    Jet compose(const std::vector<double>& outer) const {
        assert(outer.size() >= c_.size());
        Jet delta = *this;
        delta.c_[0] = 0.0;
        Jet out(order(), outer[0]);
        Jet power(order(), 1.0);
        for (std::size_t k = 1; k < c_.size(); ++k) {
            power = power * delta;
            for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] += outer[k] * power.c_[i];
        }
        return out;
    }

private:
    std::vector<double> c_;
};

/// Standard normal CDF of a jet. Uses Phi^(k)(u) = (-1)^{k-1} He_{k-1}(u) phi(u).
inline Jet norm_cdf(const Jet& a) {
    const int n = a.order();
    const double u = a.value();
    std::vector<double> outer(static_cast<std::size_t>(n) + 1, 0.0);
    outer[0] = norm_cdf(u);
    // Probabilists' Hermite polynomials He_0..He_{n-1} at u.
    std::vector<double> he(static_cast<std::size_t>(std::max(n, 1)), 0.0);
    he[0] = 1.0;
    if (n > 1) he[1] = u;
    for (int k = 2; k < n; ++k) he[k] = u * he[k - 1] - (k - 1) * he[k - 2];
    const double density = norm_pdf(u);
    double fact = 1.0;
    for (int k = 1; k <= n; ++k) {
        fact *= k;
        const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
        outer[static_cast<std::size_t>(k)] = sign * he[static_cast<std::size_t>(k - 1)] * density / fact;
    }
    return a.compose(outer);
}

}  // namespace basket_taylor
