#include "slidecyc/derivatives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace slidecyc {

namespace {

// Central difference stencils for f^(k), error O(h^2).
double central(const std::function<double(double)>& f, double x0, int order, double h) {
    switch (order) {
        case 1:
            return (f(x0 + h) - f(x0 - h)) / (2 * h);
        case 2:
            return (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / (h * h);
        case 3:
            return (f(x0 + 2 * h) - 2 * f(x0 + h) + 2 * f(x0 - h) - f(x0 - 2 * h)) /
                   (2 * h * h * h);
        case 4:
            return (f(x0 + 2 * h) - 4 * f(x0 + h) + 6 * f(x0) - 4 * f(x0 - h) + f(x0 - 2 * h)) /
                   (h * h * h * h);
        default:
            return 0;
    }
}

}  // namespace

DiffEstimate richardson_derivative(const std::function<double(double)>& f, double x0, int order,
                                   double h0) {
    // Error expansion in h^2: one column of extrapolation per halving.
    constexpr int kLevels = 5;
    std::array<std::array<double, kLevels>, kLevels> tab{};
    double h = h0;
    for (int i = 0; i < kLevels; ++i) {
        tab[i][0] = central(f, x0, order, h);
        double p4 = 4.0;
        for (int j = 1; j <= i; ++j) {
            tab[i][j] = (p4 * tab[i][j - 1] - tab[i - 1][j - 1]) / (p4 - 1.0);
            p4 *= 4.0;
        }
        h *= 0.5;
    }
    DiffEstimate out;
    out.value = tab[kLevels - 1][kLevels - 1];
    out.error = std::abs(tab[kLevels - 1][kLevels - 1] - tab[kLevels - 2][kLevels - 2]);
    // Non-monotone tableau diagonal signals noise-dominated estimates.
    const double d1 = std::abs(tab[kLevels - 2][kLevels - 2] - tab[kLevels - 3][kLevels - 3]);
    out.reliable = !(out.error > 10.0 * d1 && out.error > 1e-6 * std::abs(out.value) + 1e-12);
    return out;
}

MultiplicityResult zero_multiplicity(const std::function<double(double)>& f, double x0, int m_max,
                                     double tau, double h0) {
    MultiplicityResult res;
    // Local magnitude scale from samples around x0.
    double scale = 0;
    for (int i = -4; i <= 4; ++i) scale = std::max(scale, std::abs(f(x0 + i * h0)));
    if (scale == 0) {
        res.multiplicity = m_max;
        res.at_least_m_max = true;
        return res;
    }
    if (std::abs(f(x0)) > tau * scale) {
        res.multiplicity = 0;
        res.leading_derivative = f(x0);
        return res;
    }
    for (int k = 1; k <= m_max; ++k) {
        const DiffEstimate d = richardson_derivative(f, x0, k, h0);
        if (!d.reliable) res.reliable = false;
        // Derivative scale grows like scale / h0^k.
        const double dscale = scale / std::pow(h0, k);
        if (std::abs(d.value) > tau * dscale) {
            res.multiplicity = k;
            res.leading_derivative = d.value;
            return res;
        }
    }
    res.multiplicity = m_max;
    res.at_least_m_max = true;
    return res;
}

}  // namespace slidecyc
