// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace qmem {

namespace {

GaussLegendreRule make_rule()
{
    constexpr int n = GaussLegendreRule::size;
    GaussLegendreRule rule{};
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2 / ((1 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre_rule()
{
    static const GaussLegendreRule rule = make_rule();
    return rule;
}

}  // namespace qmem
