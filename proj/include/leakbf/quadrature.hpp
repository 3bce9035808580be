#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include "leakbf/errors.hpp"

namespace leakbf {

namespace detail {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric halves).
inline constexpr double kGl15Nodes[8] = {
    0.0,
    0.2011940939974345223006283,
    0.3941513470775633698972074,
    0.5709721726085388475372267,
    0.7244177313601700474161861,
    0.8482065834104272162006483,
    0.9372733924007059043077589,
    0.9879925180204854284895657};

inline constexpr double kGl15Weights[8] = {
    0.2025782419255612728806202,
    0.1984314853271115764561183,
    0.1861610000155622110268006,
    0.1662692058169939335532009,
    0.1395706779261543144478048,
    0.1071592204671719350118695,
    0.0703660474881081247092674,
    0.0307532419961172683546284};

template <typename F>
double gl15(F&& f, double a, double b) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double s = kGl15Weights[0] * f(c);
    for (int i = 1; i < 8; ++i) {
        double dx = h * kGl15Nodes[i];
        s += kGl15Weights[i] * (f(c + dx) + f(c - dx));
    }
    return s * h;
}

template <typename F>
double adapt(F&& f, double a, double b, double whole, double tol, int depth) {
    double c = 0.5 * (a + b);
    double left = gl15(f, a, c);
    double right = gl15(f, c, b);
    double diff = left + right - whole;
    if (std::abs(diff) <= tol || depth >= 48) return left + right + diff / 15.0;
    return adapt(f, a, c, left, 0.5 * tol, depth + 1) +
           adapt(f, c, b, right, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Adaptive Gauss-Legendre quadrature of f on [a, b].
/// abs_tol is an absolute target on the panel refinement error.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
    if (!(b >= a)) throw InvalidInputError("integrate: requires b >= a");
    if (a == b) return 0.0;
    double whole = detail::gl15(f, a, b);
    return detail::adapt(f, a, b, whole, abs_tol, 0);
}

} // namespace leakbf
