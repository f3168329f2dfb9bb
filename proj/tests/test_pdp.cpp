#include "oracles.hpp"

#include "tdl/errors.hpp"
#include "tdl/pdp.hpp"

#include <doctest.h>

#include <cmath>

using namespace tdl;

namespace {

const PdpSpec kProfiles[] = {
    PdpSpec::exponential(1.0),
    PdpSpec::gaussian(1.0),
    PdpSpec::uniform(1.0),
    PdpSpec::truncated_exponential(1.0),
    PdpSpec::exponential(0.37),
    PdpSpec::uniform(2.5),
    PdpSpec::truncated_exponential(0.8, 4.0),
};

// R_H(f) by direct numerical Fourier transform of the oracle density.
std::complex<double> numeric_autocorr(const PdpSpec& s, double f)
{
    const auto br = oracle::support_breaks(s);
    const double h = std::min(s.tau_ds / 8.0, 0.05 / std::max(std::abs(f), 1e-3));
    const double re = oracle::integrate_pieces(
        [&](double t) { return oracle::density(s, t) * std::cos(2.0 * oracle::kPi * f * t); },
        br.front(), br.back(), h);
    const double im = oracle::integrate_pieces(
        [&](double t) { return oracle::density(s, t) * std::sin(2.0 * oracle::kPi * f * t); },
        br.front(), br.back(), h);
    return {re, im};
}

} // namespace

TEST_SUITE("pdp")
{
    TEST_CASE("densities integrate to one and have the requested spread")
    {
        for (const auto& s : kProfiles) {
            CAPTURE(describe(s));
            const auto br = oracle::support_breaks(s);
            const double area = oracle::integrate_pieces([&](double t) { return pdp_value(s, t); },
                                                         br.front(), br.back(), s.tau_ds / 8.0);
            CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(oracle::moments(s).second == doctest::Approx(s.tau_ds).epsilon(1e-10));
        }
    }

    TEST_CASE("pdp_value matches the textbook densities")
    {
        for (const auto& s : kProfiles) {
            CAPTURE(describe(s));
            for (double t = -1.0; t < 8.0 * s.tau_ds; t += 0.173 * s.tau_ds) {
                CHECK(pdp_value(s, t) == doctest::Approx(oracle::density(s, t)).epsilon(1e-13));
            }
        }
        CHECK(pdp_value(PdpSpec::exponential(1.0), 0.0) == doctest::Approx(1.0));
        CHECK(pdp_value(PdpSpec::uniform(1.0), 0.0) == doctest::Approx(1.0 / std::sqrt(12.0)));
        CHECK(pdp_value(PdpSpec::uniform(1.0), std::sqrt(12.0)) == 0.0);
        CHECK_THROWS_AS(pdp_value(PdpSpec::delta(), 0.0), UnsupportedOperation);
    }

    TEST_CASE("closed-form autocorrelation matches numerical Fourier transform")
    {
        for (const auto& s : kProfiles) {
            CAPTURE(describe(s));
            for (double f : {0.0, 0.013, -0.07, 0.159, 0.5, -1.3, 2.75}) {
                CAPTURE(f);
                const auto got = channel_autocorr(s, f);
                const auto want = numeric_autocorr(s, f);
                CHECK(std::abs(got - want) < 1e-10);
            }
            CHECK(std::abs(channel_autocorr(s, 0.0) - 1.0) < 1e-14);
            const auto a = channel_autocorr(s, 0.31);
            const auto b = channel_autocorr(s, -0.31);
            CHECK(std::abs(a - std::conj(b)) < 1e-14);
            CHECK(std::abs(a) <= 1.0 + 1e-14);
        }
    }

    TEST_CASE("exponential autocorrelation sign convention")
    {
        const auto r = channel_autocorr(PdpSpec::exponential(1.0), 1.0 / (2.0 * oracle::kPi));
        CHECK(r.real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(r.imag() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(channel_autocorr(PdpSpec::delta(), 12.3) == std::complex<double>(1.0, 0.0));
        const auto g = channel_autocorr(PdpSpec::gaussian(1.0), 1.0);
        CHECK(g.real() == doctest::Approx(std::exp(-2.0 * oracle::kPi * oracle::kPi)).epsilon(1e-12));
        CHECK(g.real() == doctest::Approx(2.675e-9).epsilon(1e-3));
    }

    TEST_CASE("truncated exponential autocorrelation is stable near f = 0")
    {
        const auto s = PdpSpec::truncated_exponential(1.0);
        for (double f : {1e-12, 1e-9, 1e-6}) {
            const auto r = channel_autocorr(s, f);
            // First moment gives the slope: R(f) ~ 1 + j 2 pi f E[tau].
            const double mean = oracle::moments(s).first;
            CHECK(r.real() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(r.imag() == doctest::Approx(2.0 * oracle::kPi * f * mean).epsilon(1e-6));
        }
    }

    TEST_CASE("truncated exponential std closed form")
    {
        for (double a : {1e-3, 0.05, 0.5, 1.0, 3.0, 50.0, 1e4}) {
            for (double m : {0.5, 2.0, 6.0}) {
                CAPTURE(a);
                CAPTURE(m);
                PdpSpec s;
                s.kind = PdpKind::TruncatedExponential;
                s.tau_ds = std::min(a, m);
                s.te_tau_0 = a;
                s.te_tau_m = m;
                // Fine pieces so the sharp decay at small a is resolved.
                const double h = std::min(a, m) / 16.0;
                auto mom = [&](int k) {
                    return oracle::integrate_pieces(
                        [&](double t) { return std::pow(t, k) * oracle::density(s, t); }, 0.0,
                        std::min(m, 60.0 * a), h);
                };
                const double mean = mom(1) / mom(0);
                const double want = std::sqrt(mom(2) / mom(0) - mean * mean);
                CHECK(truncated_exponential_std(a, m) == doctest::Approx(want).epsilon(1e-9));
            }
        }
        // Uniform limit and pure exponential limit.
        CHECK(truncated_exponential_std(1e9, 6.0) == doctest::Approx(6.0 / std::sqrt(12.0)));
        CHECK(truncated_exponential_std(0.01, 60.0) == doctest::Approx(0.01));
    }

    TEST_CASE("calibrate_te agrees with bisection on numerical moments")
    {
        for (double m : {4.0, 5.0, 6.0, 10.0}) {
            CAPTURE(m);
            const double tau0 = calibrate_te(1.0, m);
            CHECK(tau0 == doctest::Approx(oracle::te_tau0_by_bisection(1.0, m)).epsilon(1e-9));
            CHECK(truncated_exponential_std(tau0, m) == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(calibrate_te(1.0, 6.0) == doctest::Approx(1.0618).epsilon(1e-4));
        CHECK(calibrate_te(1.0, 1000.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(calibrate_te(2.0, 12.0) == doctest::Approx(2.0 * calibrate_te(1.0, 6.0)));
    }

    TEST_CASE("calibrate_te rejects infeasible spans and names the range")
    {
        CHECK_THROWS_AS(calibrate_te(1.0, 3.0), CalibrationError);
        CHECK_THROWS_AS(calibrate_te(1.0, std::sqrt(12.0)), CalibrationError);
        try {
            calibrate_te(1.0, 2.0);
            FAIL("expected CalibrationError");
        } catch (const CalibrationError& e) {
            CHECK(std::string(e.what()).find("sqrt(12)") != std::string::npos);
            CHECK(e.category() == "calibration");
        }
        CHECK_THROWS_AS(PdpSpec::truncated_exponential(1.0, 1.0), CalibrationError);
    }

    TEST_CASE("named constructors validate and default")
    {
        CHECK_THROWS(PdpSpec::exponential(0.0));
        CHECK_THROWS(PdpSpec::gaussian(-1.0));
        const auto te = PdpSpec::truncated_exponential(2.0);
        CHECK(te.te_tau_m == doctest::Approx(kDefaultTeSpan * 2.0));
        CHECK(te.te_tau_0 > 0.0);
        CHECK(PdpSpec::make(PdpKind::Gaussian, 3.0).tau_ds == 3.0);
    }

    TEST_CASE("kind names round trip")
    {
        for (auto k : {PdpKind::Exponential, PdpKind::Gaussian, PdpKind::Uniform,
                       PdpKind::TruncatedExponential, PdpKind::DeltaTest}) {
            CHECK(parse_pdp_kind(to_string(k)) == k);
        }
        CHECK(parse_pdp_kind("TE") == PdpKind::TruncatedExponential);
        CHECK_THROWS_AS(parse_pdp_kind("rayleigh"), UsageError);
    }

    TEST_CASE("delay span and discontinuities")
    {
        const auto u = PdpSpec::uniform(1.0);
        CHECK(delay_span(u).hi == doctest::Approx(std::sqrt(12.0)));
        CHECK(pdp_discontinuities(u).size() == 2);
        CHECK(pdp_discontinuities(PdpSpec::gaussian()).empty());
        const auto e = PdpSpec::exponential(1.0);
        CHECK(std::exp(-delay_span(e).hi) < 1e-15);
    }
}
