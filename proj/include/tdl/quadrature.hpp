#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

namespace tdl::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline Rule gauss_legendre(int n)
{
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

template <int N>
const Rule& cached_rule()
{
    static const Rule rule = gauss_legendre(N);
    return rule;
}

/// Applies a rule to f on [a, b].
template <class F>
auto apply_rule(const Rule& rule, F& f, double a, double b)
{
    using T = std::invoke_result_t<F&, double>;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T sum{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

struct Options
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    /// Initial panels never exceed this width.
    double max_panel_width = std::numeric_limits<double>::infinity();
    std::size_t max_panels = 1u << 20;
};

template <class T>
struct Result
{
    T value{};
    double error = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

/// Globally adaptive panel Gauss-Legendre quadrature.
///
/// Each panel is integrated with a 20-point rule; the 10-point rule on the
/// same panel supplies an error estimate. The panel with the largest
/// estimate is bisected until the summed estimate is below
/// max(abs_tol, rel_tol * |value|). Breakpoints mark kinks or jumps of the
/// integrand; the integrand is never evaluated exactly at them.
template <class F>
auto integrate(F&& f, std::span<const double> breakpoints, const Options& opts = {})
    -> Result<std::invoke_result_t<F&, double>>
{
    using T = std::invoke_result_t<F&, double>;
    const Rule& fine = cached_rule<20>();
    const Rule& coarse = cached_rule<10>();

    struct Panel
    {
        double a;
        double b;
        T value;
        double error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };

    auto evaluate = [&](double a, double b) {
        const T hi = apply_rule(fine, f, a, b);
        const T lo = apply_rule(coarse, f, a, b);
        return Panel{a, b, hi, std::abs(hi - lo)};
    };

    std::priority_queue<Panel> queue;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        const double a = breakpoints[k];
        const double b = breakpoints[k + 1];
        if (!(b > a)) continue;
        const auto pieces = static_cast<std::size_t>(
            std::max(1.0, std::ceil((b - a) / opts.max_panel_width)));
        const double width = (b - a) / static_cast<double>(pieces);
        for (std::size_t i = 0; i < pieces; ++i) {
            const double lo = a + width * static_cast<double>(i);
            const double hi = (i + 1 == pieces) ? b : lo + width;
            queue.push(evaluate(lo, hi));
        }
    }

    auto totals = [&] {
        // Sum in a fixed order so repeated calls agree bitwise.
        std::vector<Panel> all;
        all.reserve(queue.size());
        auto copy = queue;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        T value{};
        double error = 0.0;
        for (const auto& p : all) {
            value += p.value;
            error += p.error;
        }
        return std::pair{value, error};
    };

    Result<T> result;
    // Running sums drive the loop; the final answer is re-summed in order.
    T value{};
    double error = 0.0;
    {
        auto [v, e] = totals();
        value = v;
        error = e;
    }
    while (!queue.empty()) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
        if (error <= target) {
            result.converged = true;
            break;
        }
        if (queue.size() >= opts.max_panels) break;
        const Panel worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        queue.pop();
        const Panel left = evaluate(worst.a, mid);
        const Panel right = evaluate(mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    if (queue.empty()) result.converged = true;

    auto [v, e] = totals();
    result.value = v;
    result.error = e;
    result.panels = queue.size();
    if (!result.converged) {
        result.converged = e <= std::max(opts.abs_tol, opts.rel_tol * std::abs(v));
    }
    return result;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opts = {})
{
    const double edges[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(edges, 2), opts);
}

} // namespace tdl::quad
