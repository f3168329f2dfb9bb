#pragma once

// Reference computations for the tests. They deliberately avoid the library's
// quadrature and linear algebra so that agreement means something.

#include "tdl/pdp.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double sinc(double x)
{
    if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
    return std::sin(kPi * x) / (kPi * x);
}

/// Densities written straight from their definitions.
inline double density(const tdl::PdpSpec& s, double tau)
{
    const double t = s.tau_ds;
    switch (s.kind) {
    case tdl::PdpKind::Exponential:
        return tau < 0.0 ? 0.0 : std::exp(-tau / t) / t;
    case tdl::PdpKind::Gaussian:
        return std::exp(-tau * tau / (2.0 * t * t)) / (t * std::sqrt(2.0 * kPi));
    case tdl::PdpKind::Uniform: {
        const double w = t * std::sqrt(12.0);
        return (tau < 0.0 || tau >= w) ? 0.0 : 1.0 / w;
    }
    case tdl::PdpKind::TruncatedExponential: {
        const double a = s.te_tau_0;
        const double m = s.te_tau_m;
        if (tau < 0.0 || tau >= m) return 0.0;
        return std::exp(-tau / a) / (a * (1.0 - std::exp(-m / a)));
    }
    default:
        return 0.0;
    }
}

/// Support used for the delay-domain integrals, with the jump points.
inline std::vector<double> support_breaks(const tdl::PdpSpec& s)
{
    const double t = s.tau_ds;
    switch (s.kind) {
    case tdl::PdpKind::Exponential:
        return {0.0, 45.0 * t};
    case tdl::PdpKind::Gaussian:
        return {-10.0 * t, 10.0 * t};
    case tdl::PdpKind::Uniform:
        return {0.0, t * std::sqrt(12.0)};
    case tdl::PdpKind::TruncatedExponential:
        return {0.0, s.te_tau_m};
    default:
        return {0.0, 0.0};
    }
}

/// Integral of f over [a, b] cut into pieces no wider than h.
template <class F>
double integrate_pieces(F&& f, double a, double b, double h)
{
    if (!(b > a)) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    const double w = (b - a) / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        total += boost::math::quadrature::gauss<double, 30>::integrate(f, a + i * w,
                                                                        a + (i + 1) * w);
    }
    return total;
}

/// E{h_l h_p^*} as the delay-domain integral of P(tau) sinc(2B tau - l) sinc(2B tau - p).
inline double delay_domain_covariance(const tdl::PdpSpec& s, double bandwidth, int l, int p)
{
    const double two_b = 2.0 * bandwidth;
    const auto br = support_breaks(s);
    auto f = [&](double tau) {
        return density(s, tau) * sinc(two_b * tau - l) * sinc(two_b * tau - p);
    };
    return integrate_pieces(f, br.front(), br.back(), 0.25 / two_b);
}

/// The same entry as a double integral over the band, on a tensor Gauss-Legendre grid.
inline std::complex<double> frequency_domain_covariance(const tdl::PdpSpec& s, double bandwidth,
                                                        int l, int p, int panels = 24)
{
    const double two_b = 2.0 * bandwidth;
    auto inner = [&](double f2, bool imag) {
        auto g = [&](double f1) {
            const std::complex<double> v =
                tdl::channel_autocorr(s, f1 - f2) *
                std::polar(1.0, -2.0 * kPi * (l * f1 - p * f2) / two_b);
            return imag ? v.imag() : v.real();
        };
        return integrate_pieces(g, -bandwidth, bandwidth, two_b / panels);
    };
    const double re = integrate_pieces([&](double f2) { return inner(f2, false); }, -bandwidth,
                                       bandwidth, two_b / panels);
    const double im = integrate_pieces([&](double f2) { return inner(f2, true); }, -bandwidth,
                                       bandwidth, two_b / panels);
    return std::complex<double>(re, im) / (two_b * two_b);
}

/// Mean and standard deviation of the density by numerical moments.
inline std::pair<double, double> moments(const tdl::PdpSpec& s)
{
    const auto br = support_breaks(s);
    const double h = s.tau_ds / 8.0;
    const double m0 = integrate_pieces([&](double t) { return density(s, t); }, br.front(),
                                       br.back(), h);
    const double m1 = integrate_pieces([&](double t) { return t * density(s, t); }, br.front(),
                                       br.back(), h);
    const double m2 = integrate_pieces([&](double t) { return t * t * density(s, t); },
                                       br.front(), br.back(), h);
    const double mean = m1 / m0;
    return {mean, std::sqrt(m2 / m0 - mean * mean)};
}

/// tau_0 such that the truncated exponential on [0, tau_m] has rms spread
/// tau_ds, by scanning and bisecting on numerical moments.
inline double te_tau0_by_bisection(double tau_ds, double tau_m)
{
    auto spread = [&](double a) {
        tdl::PdpSpec s;
        s.kind = tdl::PdpKind::TruncatedExponential;
        s.tau_ds = tau_ds;
        s.te_tau_m = tau_m;
        s.te_tau_0 = a;
        return moments(s).second - tau_ds;
    };
    double lo = 1e-3 * tau_ds;
    double hi = lo;
    while (spread(hi) < 0.0) {
        lo = hi;
        hi *= 1.5;
        if (hi > 1e4 * tau_ds) return std::nan("");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (spread(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Trace of the inverse through a full-pivot LU inverse.
template <class M>
double trace_of_inverse(const M& a)
{
    return std::real(a.fullPivLu().inverse().trace());
}

} // namespace oracle
