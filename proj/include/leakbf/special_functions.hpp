#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "leakbf/errors.hpp"

namespace leakbf {

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 coefficients).
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: requires x > 0");
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};

    if (x < 0.5) {
        // reflection keeps the series argument >= 0.5
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + static_cast<double>(i));
    double t = z + g + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(a);
}

/// beta(x, y) = Gamma(x) Gamma(y) / Gamma(x + y), x, y > 0.
inline double beta_fn(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("beta_fn: requires x, y > 0");
    return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
/// Power series below 1, modified Lentz continued fraction above.
inline double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw DomainError("exp_integral_e1: requires x > 0");
    constexpr double euler_gamma = 0.57721566490153286060651209008240243;
    if (x <= 1.0) {
        double sum = 0.0;
        double term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= -x / static_cast<double>(k);
            double add = -term / static_cast<double>(k);
            sum += add;
            if (std::abs(add) < 1e-18 * std::max(std::abs(sum), 1e-30)) break;
        }
        return -euler_gamma - std::log(x) + sum;
    }
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

/// CDF of ||h||^2 for h with N i.i.d. unit-variance complex Gaussian entries
/// (chi-squared with 2N degrees of freedom, each variance 1/2):
///   P_R(r) = 1 - e^{-r} sum_{l=0}^{N-1} r^l / l!
inline double chi2_cdf(double r, std::size_t n) {
    if (n < 1) throw DomainError("chi2_cdf: requires N >= 1");
    if (!(r >= 0.0)) throw DomainError("chi2_cdf: requires r >= 0");
    if (r == 0.0) return 0.0;
    if (r > 709.0) return 1.0; // e^{-r} underflows; the tail is below 1e-300
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t l = 1; l < n; ++l) {
        term *= r / static_cast<double>(l);
        sum += term;
    }
    double v = 1.0 - std::exp(-r) * sum;
    return std::min(1.0, std::max(0.0, v));
}

/// Density of the same distribution: r^{N-1} e^{-r} / (N-1)!.
inline double chi2_pdf(double r, std::size_t n) {
    if (n < 1) throw DomainError("chi2_pdf: requires N >= 1");
    if (r < 0.0) return 0.0;
    if (r == 0.0) return n == 1 ? 1.0 : 0.0;
    double ln = static_cast<double>(n - 1) * std::log(r) - r - log_gamma(static_cast<double>(n));
    return std::exp(ln);
}

/// Inverse of chi2_cdf in r, bracketed bisection on [0, N + 20 sqrt(N)]
/// (bracket doubled if needed). Terminates at 1e-12 on the probability scale.
inline double chi2_cdf_inverse(double p, std::size_t n) {
    if (n < 1) throw DomainError("chi2_cdf_inverse: requires N >= 1");
    if (!(p > 0.0) || !(p < 1.0)) throw DomainError("chi2_cdf_inverse: requires 0 < p < 1");
    double lo = 0.0;
    double hi = static_cast<double>(n) + 20.0 * std::sqrt(static_cast<double>(n));
    while (chi2_cdf(hi, n) < p) {
        hi *= 2.0;
        if (hi > 1e6) throw BracketError("chi2_cdf_inverse: failed to bracket target");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        mid = 0.5 * (lo + hi);
        double f = chi2_cdf(mid, n);
        if (std::abs(f - p) <= 1e-12 || hi - lo <= 1e-15 * std::max(1.0, mid)) break;
        if (f < p)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

} // namespace leakbf
