// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>

namespace qmem {

//! 20-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    static constexpr std::size_t size = 20;
    std::array<double, size> nodes;
    std::array<double, size> weights;
};

const GaussLegendreRule& gauss_legendre_rule();

//! Composite Gauss-Legendre integral of f over [a, b] using `panels`
//! equal sub-intervals.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 1)
{
    const auto& rule = gauss_legendre_rule();
    double h = (b - a) / panels;
    double sum = 0;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        double mid = lo + h / 2;
        double panel = 0;
        for (std::size_t i = 0; i < GaussLegendreRule::size; ++i)
            panel += rule.weights[i] * f(mid + h / 2 * rule.nodes[i]);
        sum += panel * h / 2;
    }
    return sum;
}

}  // namespace qmem
