#include "tdl/pdp.hpp"

#include "tdl/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

namespace tdl {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt12 = std::sqrt(12.0);

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

double sinc(double x)
{
    if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
    return std::sin(kPi * x) / (kPi * x);
}

double uniform_width(const PdpSpec& spec) { return spec.tau_ds * kSqrt12; }

} // namespace

std::string_view to_string(PdpKind kind)
{
    switch (kind) {
    case PdpKind::Exponential: return "exponential";
    case PdpKind::Gaussian: return "gaussian";
    case PdpKind::Uniform: return "uniform";
    case PdpKind::TruncatedExponential: return "trunc_exponential";
    case PdpKind::DeltaTest: return "delta";
    }
    return "unknown";
}

PdpKind parse_pdp_kind(std::string_view name)
{
    if (name == "exponential" || name == "E") return PdpKind::Exponential;
    if (name == "gaussian" || name == "G") return PdpKind::Gaussian;
    if (name == "uniform" || name == "U") return PdpKind::Uniform;
    if (name == "trunc_exponential" || name == "TE") return PdpKind::TruncatedExponential;
    if (name == "delta") return PdpKind::DeltaTest;
    throw UsageError("pdp: unknown kind '" + std::string(name) +
                     "' (expected exponential|gaussian|uniform|trunc_exponential|delta)");
}

PdpSpec PdpSpec::exponential(double tau_ds)
{
    require_positive(tau_ds, "tau_ds");
    return {PdpKind::Exponential, tau_ds, 0.0, 0.0};
}

PdpSpec PdpSpec::gaussian(double tau_ds)
{
    require_positive(tau_ds, "tau_ds");
    return {PdpKind::Gaussian, tau_ds, 0.0, 0.0};
}

PdpSpec PdpSpec::uniform(double tau_ds)
{
    require_positive(tau_ds, "tau_ds");
    return {PdpKind::Uniform, tau_ds, 0.0, 0.0};
}

PdpSpec PdpSpec::truncated_exponential(double tau_ds, double tau_m)
{
    require_positive(tau_ds, "tau_ds");
    if (tau_m <= 0.0) tau_m = kDefaultTeSpan * tau_ds;
    return {PdpKind::TruncatedExponential, tau_ds, tau_m, calibrate_te(tau_ds, tau_m)};
}

PdpSpec PdpSpec::delta() { return {PdpKind::DeltaTest, 1.0, 0.0, 0.0}; }

PdpSpec PdpSpec::make(PdpKind kind, double tau_ds, double tau_m)
{
    switch (kind) {
    case PdpKind::Exponential: return exponential(tau_ds);
    case PdpKind::Gaussian: return gaussian(tau_ds);
    case PdpKind::Uniform: return uniform(tau_ds);
    case PdpKind::TruncatedExponential: return truncated_exponential(tau_ds, tau_m);
    case PdpKind::DeltaTest: return delta();
    }
    throw UsageError("pdp: unknown kind");
}

double pdp_value(const PdpSpec& spec, double tau)
{
    switch (spec.kind) {
    case PdpKind::Exponential:
        return tau < 0.0 ? 0.0 : std::exp(-tau / spec.tau_ds) / spec.tau_ds;
    case PdpKind::Gaussian: {
        const double z = tau / spec.tau_ds;
        return std::exp(-0.5 * z * z) / (spec.tau_ds * std::sqrt(2.0 * kPi));
    }
    case PdpKind::Uniform: {
        const double width = uniform_width(spec);
        return (tau < 0.0 || tau >= width) ? 0.0 : 1.0 / width;
    }
    case PdpKind::TruncatedExponential: {
        if (tau < 0.0 || tau >= spec.te_tau_m) return 0.0;
        const double a = spec.te_tau_0;
        const double mass = -std::expm1(-spec.te_tau_m / a);
        return std::exp(-tau / a) / (a * mass);
    }
    case PdpKind::DeltaTest:
        throw UnsupportedOperation("pdp_value: the delta profile has no pointwise density");
    }
    return 0.0;
}

std::complex<double> channel_autocorr(const PdpSpec& spec, double f)
{
    using cd = std::complex<double>;
    switch (spec.kind) {
    case PdpKind::Exponential:
        return 1.0 / cd(1.0, -2.0 * kPi * f * spec.tau_ds);
    case PdpKind::Gaussian: {
        const double s = kPi * f * spec.tau_ds;
        return {std::exp(-2.0 * s * s), 0.0};
    }
    case PdpKind::Uniform: {
        const double width = uniform_width(spec);
        return std::polar(sinc(f * width), kPi * f * width);
    }
    case PdpKind::TruncatedExponential: {
        const double a = spec.te_tau_0;
        const double x = spec.te_tau_m / a;
        const double theta = 2.0 * kPi * f * spec.te_tau_m;
        // 1 - exp(-x + j theta), arranged to stay accurate for small x and theta.
        const double em1 = std::expm1(-x);
        const double half_sin = std::sin(0.5 * theta);
        const cd expz_minus_1(em1 * std::cos(theta) - 2.0 * half_sin * half_sin,
                              std::exp(-x) * std::sin(theta));
        const cd numerator = -expz_minus_1;
        const double mass = -em1;
        return numerator / (mass * cd(1.0, -2.0 * kPi * f * a));
    }
    case PdpKind::DeltaTest:
        return {1.0, 0.0};
    }
    return {0.0, 0.0};
}

double truncated_exponential_std(double tau_0, double tau_m)
{
    require_positive(tau_0, "tau_0");
    require_positive(tau_m, "tau_m");
    const double x = tau_m / tau_0;
    double variance = 0.0;
    if (x < 1e-2) {
        // a^2 (1 - (x/2)^2 / sinh^2(x/2)) loses everything to cancellation here.
        const double x2 = x * x;
        variance = tau_m * tau_m * (1.0 / 12.0 - x2 / 240.0 + x2 * x2 / 6048.0);
    } else if (x > 700.0) {
        variance = tau_0 * tau_0;
    } else {
        const double s = std::sinh(0.5 * x);
        variance = tau_0 * tau_0 - tau_m * tau_m / (4.0 * s * s);
    }
    return std::sqrt(variance);
}

double calibrate_te(double tau_ds, double tau_m)
{
    require_positive(tau_ds, "tau_ds");
    require_positive(tau_m, "tau_m");
    const double uniform_limit = tau_m / kSqrt12;
    if (!(uniform_limit > tau_ds * (1.0 + 1e-9))) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "calibrate_te: no tau_0 gives std " << tau_ds << " on [0, " << tau_m
            << "]; feasible tau_m range is tau_m > sqrt(12)*tau_ds = " << kSqrt12 * tau_ds;
        throw CalibrationError(msg.str());
    }

    auto residual = [&](double log_tau0) {
        return truncated_exponential_std(std::exp(log_tau0), tau_m) / tau_ds - 1.0;
    };

    double lo = std::log(tau_ds) - 10.0;
    double hi = std::log(tau_ds);
    while (residual(hi) <= 0.0) {
        hi += std::log(4.0);
        if (hi > std::log(tau_ds) + 35.0) {
            throw CalibrationError(
                "calibrate_te: tau_m is too close to the uniform limit sqrt(12)*tau_ds; "
                "tau_0 is numerically unbounded");
        }
    }
    while (residual(lo) >= 0.0) lo -= 10.0;

    std::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        residual, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
    const double log_tau0 = 0.5 * (bracket.first + bracket.second);
    const double tau_0 = std::exp(log_tau0);
    if (std::abs(residual(log_tau0)) > 1e-10) {
        throw CalibrationError("calibrate_te: root search stalled before reaching 1e-10 residual");
    }
    return tau_0;
}

DelaySpan delay_span(const PdpSpec& spec)
{
    switch (spec.kind) {
    case PdpKind::Exponential: return {0.0, 40.0 * spec.tau_ds};
    case PdpKind::Gaussian: return {-9.0 * spec.tau_ds, 9.0 * spec.tau_ds};
    case PdpKind::Uniform: return {0.0, uniform_width(spec)};
    case PdpKind::TruncatedExponential: return {0.0, spec.te_tau_m};
    case PdpKind::DeltaTest: return {0.0, 0.0};
    }
    return {0.0, 0.0};
}

std::vector<double> pdp_discontinuities(const PdpSpec& spec)
{
    switch (spec.kind) {
    case PdpKind::Exponential: return {0.0};
    case PdpKind::Gaussian: return {};
    case PdpKind::Uniform: return {0.0, uniform_width(spec)};
    case PdpKind::TruncatedExponential: return {0.0, spec.te_tau_m};
    case PdpKind::DeltaTest: return {0.0};
    }
    return {};
}

std::string describe(const PdpSpec& spec)
{
    std::ostringstream out;
    out << to_string(spec.kind) << "(tau_ds=" << spec.tau_ds;
    if (spec.kind == PdpKind::TruncatedExponential) {
        out << ", tau_m=" << spec.te_tau_m << ", tau_0=" << spec.te_tau_0;
    }
    out << ")";
    return out.str();
}

} // namespace tdl
