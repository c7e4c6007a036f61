#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oblique::quadrature {

struct Rule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points, nodes found by Newton iteration on P_n.
inline Rule gauss_legendre(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("gauss_legendre: need at least one node");
    }
    Rule rule{std::vector<double>(n), std::vector<double>(n)};
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                const auto kd = static_cast<double>(k);
                p0 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p2) / kd;
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double integrate(F&& f, double a, double b, std::size_t panels, const Rule& rule)
{
    if (panels == 0 || b <= a) {
        return 0.0;
    }
    const double width = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double mid = lo + 0.5 * width;
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            acc += rule.weights[q] * f(mid + 0.5 * width * rule.nodes[q]);
        }
        total += 0.5 * width * acc;
    }
    return total;
}

/// Integrates f over [a, b], splitting at the given breakpoints (those outside
/// (a, b) are ignored). Each piece gets panels proportional to its length so
/// that a function of angular frequency `max_frequency` sees at least
/// `panels_per_period` panels per oscillation.
template <class F>
double integrate_piecewise(F&& f, double a, double b, std::vector<double> breakpoints,
                           double max_frequency, const Rule& rule,
                           std::size_t panels_per_period = 4)
{
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    const double period = max_frequency > 0.0 ? 2.0 * std::numbers::pi / max_frequency : (b - a);
    const double panel_width = period / static_cast<double>(panels_per_period);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::max(a, breakpoints[i]);
        const double hi = std::min(b, breakpoints[i + 1]);
        if (hi <= lo) {
            continue;
        }
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel_width));
        total += integrate(f, lo, hi, std::max<std::size_t>(panels, 1), rule);
    }
    return total;
}

} // namespace oblique::quadrature
