#pragma once

// Test-only reference computations, independent of the library code paths.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qam::oracle {

/// erf(x) by its Maclaurin series in long double, summed until terms vanish.
inline long double erf_series(long double x) {
    long double term = x;  // (-1)^n x^(2n+1) / n!
    long double sum = x;
    for (int n = 1; n < 400; ++n) {
        term *= -x * x / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-30L * std::fabs(sum)) break;
    }
    return 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
}

inline double normal_cdf_series(double d) {
    return static_cast<double>(0.5L * (1.0L + erf_series(d / std::numbers::sqrt2_v<long double>)));
}

/// Discounted expected call payoff under a lognormal terminal price, integrated
/// over the standard normal density from the exercise boundary upward.
inline double call_by_quadrature(double s, double x, double r, double sigma, double tau) {
    const double vol = sigma * std::sqrt(tau);
    const double drift = (r - 0.5 * sigma * sigma) * tau;
    const double z_star = (std::log(x / s) - drift) / vol;
    auto integrand = [&](double z) {
        const double payoff = s * std::exp(drift + vol * z) - x;
        return payoff * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    const double upper = std::max(z_star, vol) + 15.0;
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, z_star, upper, 20, 1e-15, &err);
    return std::exp(-r * tau) * integral;
}

}  // namespace qam::oracle
