#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace tdl {

enum class PdpKind
{
    Exponential,
    Gaussian,
    Uniform,
    TruncatedExponential,
    /// Single-path channel, P_h(tau) = delta(tau). Validation only.
    DeltaTest,
};

std::string_view to_string(PdpKind kind);

/// Accepts "exponential", "gaussian", "uniform", "trunc_exponential" and
/// "delta" (plus the one-letter aliases E, G, U, TE). Throws UsageError.
PdpKind parse_pdp_kind(std::string_view name);

/// A power delay profile normalized to unit area, with tau_ds its standard
/// deviation. Build one through the named constructors so the truncated
/// exponential is always calibrated.
struct PdpSpec
{
    PdpKind kind = PdpKind::Exponential;
    double tau_ds = 1.0;
    /// Maximum delay of the truncated exponential.
    double te_tau_m = 0.0;
    /// Decay constant of the truncated exponential, from calibrate_te().
    double te_tau_0 = 0.0;

    static PdpSpec exponential(double tau_ds = 1.0);
    static PdpSpec gaussian(double tau_ds = 1.0);
    static PdpSpec uniform(double tau_ds = 1.0);
    /// tau_m <= 0 selects the default 6 * tau_ds.
    static PdpSpec truncated_exponential(double tau_ds = 1.0, double tau_m = 0.0);
    static PdpSpec delta();
    static PdpSpec make(PdpKind kind, double tau_ds = 1.0, double tau_m = 0.0);
};

inline constexpr double kDefaultTeSpan = 6.0;

/// P_h(tau). The unit step is right-continuous, so P_h(0) is the peak for
/// the one-sided profiles. Throws UnsupportedOperation for DeltaTest.
double pdp_value(const PdpSpec& spec, double tau);

/// R_H(f) = integral of P_h(tau) exp(+j 2 pi f tau) over tau, closed form.
std::complex<double> channel_autocorr(const PdpSpec& spec, double f);

/// Standard deviation of the truncated exponential with decay tau_0 on
/// [0, tau_m].
double truncated_exponential_std(double tau_0, double tau_m);

/// Decay constant tau_0 that gives the truncated exponential on [0, tau_m]
/// a standard deviation of tau_ds. Feasible only for tau_m > sqrt(12) tau_ds;
/// throws CalibrationError otherwise.
double calibrate_te(double tau_ds, double tau_m);

/// Delay interval holding all but a negligible (< 1e-15) part of the
/// profile. Used to size quadrature panels and integration ranges.
struct DelaySpan
{
    double lo;
    double hi;
};
DelaySpan delay_span(const PdpSpec& spec);

/// Delays where P_h jumps.
std::vector<double> pdp_discontinuities(const PdpSpec& spec);

std::string describe(const PdpSpec& spec);

} // namespace tdl
