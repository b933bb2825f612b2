// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
// Test-only reference computations. Nothing here calls into the library's
// numerical routines.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb,
                           double whole, double tol, int depth)
{
    double m = (a + b) / 2;
    double lm = (a + m) / 2, rm = (m + b) / 2;
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol)
        return left + right + delta / 15;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
           + simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

//! Adaptive Simpson quadrature with absolute tolerance `tol`.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11, int max_depth = 50)
{
    double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

//! Integrates piecewise across the listed breakpoints (sorted, inside [a,b]).
inline double integrate_pieces(const std::function<double(double)>& f,
                               std::initializer_list<double> cuts,
                               double tol = 1e-11)
{
    double total = 0;
    const double* prev = cuts.begin();
    for (const double* it = cuts.begin() + 1; it != cuts.end(); ++it) {
        total += integrate(f, *prev, *it, tol);
        prev = it;
    }
    return total;
}

enum class Shape { square, gaussian, lorentzian };

//! Tooth absorption in frequency units: peak 1, width w (Hz).
inline double tooth_hz(Shape s, double w, double nu)
{
    switch (s) {
    case Shape::square:
        return std::abs(nu) <= w / 2 ? 1.0 : 0.0;
    case Shape::gaussian:
        return std::exp(-4 * std::log(2.0) * nu * nu / (w * w));
    case Shape::lorentzian:
        return (w * w / 4) / (nu * nu + w * w / 4);
    }
    return 0;
}

//! Period-averaged depth: ∫ d·tooth over one period, divided by Δ.
inline double effective_depth(Shape s, double d, double delta, double finesse)
{
    double w = delta / finesse;
    auto f = [&](double nu) { return d * tooth_hz(s, w, nu); };
    double area = integrate_pieces(f, {-delta / 2, -w / 2, 0, w / 2, delta / 2},
                                   1e-12 * delta);
    return area / delta;
}

//! |∫ tooth(ν) e^{2πiνt} dν / ∫ tooth|² at t = 1/Δ, by direct quadrature.
inline double dephasing(Shape s, double delta, double finesse)
{
    double w = delta / finesse;
    double t = 1 / delta;
    auto re = [&](double nu) {
        return tooth_hz(s, w, nu) * std::cos(2 * std::numbers::pi * nu * t);
    };
    auto im = [&](double nu) {
        return tooth_hz(s, w, nu) * std::sin(2 * std::numbers::pi * nu * t);
    };
    auto norm = [&](double nu) { return tooth_hz(s, w, nu); };
    std::initializer_list<double> cuts{-delta / 2, -w / 2, 0, w / 2, delta / 2};
    double n = integrate_pieces(norm, cuts, 1e-13 * delta);
    double r = integrate_pieces(re, cuts, 1e-13 * delta) / n;
    double i = integrate_pieces(im, cuts, 1e-13 * delta) / n;
    return r * r + i * i;
}

}  // namespace oracle
