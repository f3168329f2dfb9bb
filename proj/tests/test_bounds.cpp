#include "oracles.hpp"

#include "tdl/bounds.hpp"
#include "tdl/errors.hpp"
#include "tdl/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tdl;

namespace {

// Random Hermitian PSD matrix with eigenvalues spread over a few decades.
TapCovariance random_covariance(int n, rng::Stream& s, double floor)
{
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = s.complex_normal();
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    const Eigen::MatrixXcd q = qr.householderQ();
    Eigen::VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = floor + std::pow(10.0, -3.0 * s.uniform());
    const Eigen::MatrixXcd r = q * lambda.asDiagonal() * q.adjoint();
    return TapCovariance::from_matrix(TapGrid::make(1.0, 0, n - 1), r);
}

} // namespace

TEST_SUITE("bounds")
{
    TEST_CASE("flat-spectrum CRB")
    {
        const SoundingConfig cfg{100, 1.0, 1.0, 1.0};
        CHECK(crb_beta(10, cfg) == 0.1);
        const auto c = SoundingConfig::from_snr_db(50, 2.0, 10.0, 1.0);
        CHECK(c.sigma_w2 == doctest::Approx(0.2));
        CHECK(c.snr() == doctest::Approx(10.0));
        CHECK(crb_beta(5, c) == doctest::Approx(5.0 / 500.0));
        CHECK_THROWS_AS(crb_beta(0, cfg), DomainError);
        CHECK_THROWS_AS(SoundingConfig::from_snr_db(0, 1.0, 0.0, 1.0), DomainError);
    }

    TEST_CASE("FIM of a constant-modulus pilot has an exact diagonal")
    {
        const auto grid = TapGrid::make(1.0, 3, 6);
        const SoundingConfig cfg{100, 2.0, 0.5, 1.0};
        for (auto kind : {PilotKind::ConstantModulusRandomPhase, PilotKind::Chu}) {
            const auto x = sounding_pilot(kind, grid, 100, 2.0, 17);
            const auto j = fim_from_pilot(x, grid, cfg);
            for (int i = 0; i < grid.size(); ++i) {
                CHECK(j(i, i) == doctest::Approx(100.0 * 2.0 / 0.5).epsilon(1e-12));
            }
            CHECK((j - j.transpose()).norm() == 0.0);
            if (kind == PilotKind::Chu) {
                CHECK((j - 400.0 * Eigen::MatrixXd::Identity(10, 10)).norm() < 1e-9);
                CHECK(crb_trace(j) == doctest::Approx(crb_beta(10, cfg)).epsilon(1e-12));
            }
        }
        PilotSequence short_pilot = gen_pilot(PilotKind::GaussianWhite, 50, 1.0, 1);
        CHECK_THROWS_AS(fim_from_pilot(short_pilot, grid, cfg), RangeError);
    }

    TEST_CASE("FIM entries against the convolution sum")
    {
        const auto grid = TapGrid::make(1.0, 2, 3);
        const SoundingConfig cfg{40, 1.0, 0.25, 1.0};
        const auto x = sounding_pilot(PilotKind::GaussianWhite, grid, 40, 1.0, 4);
        const auto j = fim_from_pilot(x, grid, cfg);
        for (int l = -2; l <= 3; ++l) {
            for (int p = -2; p <= 3; ++p) {
                std::complex<double> acc{};
                for (int m = 1; m <= 40; ++m) acc += std::conj(x.at(m - l)) * x.at(m - p);
                CHECK(j(grid.slot(l), grid.slot(p)) ==
                      doctest::Approx(acc.real() / 0.25).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("crb_trace against a dense LU inverse")
    {
        rng::Stream s(21, 0, rng::Domain::Test);
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 2 + trial;
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = s.complex_normal().real();
            const Eigen::MatrixXd j = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
            CHECK(crb_trace(j) == doctest::Approx(oracle::trace_of_inverse(j)).epsilon(1e-9));
        }
        Eigen::MatrixXd bad(2, 2);
        bad << 1.0, 2.0, 2.0, 1.0;
        try {
            crb_trace(bad);
            FAIL("expected ConditioningError");
        } catch (const ConditioningError& e) {
            CHECK(e.min_eigenvalue() == doctest::Approx(-1.0));
        }
    }

    TEST_CASE("Bayesian bound forms agree")
    {
        rng::Stream s(22, 0, rng::Domain::Test);
        for (int trial = 0; trial < 20; ++trial) {
            const auto rh = random_covariance(3 + trial % 8, s, 1e-4);
            const SoundingConfig cfg{100, 1.0, db_to_linear(-20.0 + 2.5 * trial), 1.0};
            const double eig = bcrb_trace(rh, cfg);
            const Eigen::Index n = rh.matrix.rows();
            const Eigen::MatrixXcd lit =
                cfg.n_snr() * Eigen::MatrixXcd::Identity(n, n) + rh.matrix.fullPivLu().inverse();
            const double want = oracle::trace_of_inverse(lit);
            CHECK(eig == doctest::Approx(want).epsilon(1e-8));
            CHECK(bcrb_exact(rh, cfg) == doctest::Approx(want).epsilon(1e-8));
            const Eigen::MatrixXd j = cfg.n_snr() * Eigen::MatrixXd::Identity(n, n);
            CHECK(bfim_trace(j, rh) == doctest::Approx(want).epsilon(1e-8));
            CHECK(eig <= crb_beta(static_cast<int>(n), cfg));
            CHECK(eig <= rh.total_energy);
        }
    }

    TEST_CASE("Bayesian bound with a singular prior")
    {
        const auto grid = TapGrid::make(1.0, 0, 2);
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(3, 3);
        r(0, 0) = 1.0;
        const auto rh = TapCovariance::from_matrix(grid, r);
        const SoundingConfig cfg{10, 1.0, 1.0, 1.0};
        CHECK(bcrb_trace(rh, cfg) == doctest::Approx(1.0 / 11.0));
        CHECK(bcrb_exact(rh, cfg) == doctest::Approx(1.0 / 11.0));
        CHECK(bfim_trace(10.0 * Eigen::MatrixXd::Identity(3, 3), rh) == doctest::Approx(1.0 / 11.0));
        CHECK_THROWS_AS(bcrb_taylor_check(rh, cfg, 5), DomainError);
    }

    TEST_CASE("Taylor series converges to the eigen form")
    {
        rng::Stream s(23, 0, rng::Domain::Test);
        for (int trial = 0; trial < 5; ++trial) {
            const auto rh = random_covariance(6, s, 0.5);
            const SoundingConfig cfg{100, 1.0, 0.1, 1.0};
            const double ratio = 1.0 / (cfg.n_snr() * rh.eigenvalues.minCoeff());
            const int terms = static_cast<int>(std::ceil(std::log(1e-16) / std::log(ratio)));
            CHECK(std::abs(bcrb_taylor_check(rh, cfg, terms) - bcrb_trace(rh, cfg)) < 1e-10);
            CHECK(bcrb_taylor_check(rh, cfg, 0) == doctest::Approx(crb_beta(6, cfg)));
        }
    }

    TEST_CASE("Toeplitz FIM and the asymptotic per-tap CRB")
    {
        const SoundingConfig cfg{100, 1.0, 0.5, 2.0};
        std::vector<std::complex<double>> lags{1.0, 0.25, 0.0, 0.0};
        const auto j = fim_toeplitz(lags, cfg, 4);
        CHECK(j(0, 1) == doctest::Approx(200.0 * 0.25));
        CHECK(j(0, 3) == 0.0);
        const double fs = cfg.fs();
        auto psd = [&](double f) { return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * f / fs); };
        const double want = 0.5 / 100.0 / std::sqrt(1.0 - 0.25);
        CHECK(asymptotic_per_tap_crb(psd, cfg) == doctest::Approx(want).epsilon(1e-9));
        auto flat = [](double) { return 1.0; };
        CHECK(asymptotic_per_tap_crb(flat, cfg) == doctest::Approx(crb_beta(1, cfg)).epsilon(1e-12));
        auto zero = [&](double f) { return 1.0 + std::cos(2.0 * std::numbers::pi * f / fs); };
        CHECK_THROWS_AS(asymptotic_per_tap_crb(zero, cfg), DomainError);
        CHECK_THROWS_AS(fim_toeplitz(lags, cfg, 5), RangeError);
    }

    TEST_CASE("wideband approximation")
    {
        const SoundingConfig cfg{100, 1.0, 1.0, 10.0};
        CHECK(bcrb_wideband(20, cfg, 1.0) == doctest::Approx(20.0 / 120.0));
        CHECK(bcrb_wideband(97, cfg, 1.0) == doctest::Approx(0.8083).epsilon(1e-4));
        CHECK(bcrb_wideband(97, cfg, 1e15) == doctest::Approx(crb_beta(97, cfg)));
        const SoundingConfig quiet{100, 1e-12, 1.0, 10.0};
        CHECK(bcrb_wideband(97, quiet, 0.5) == doctest::Approx(97.0 * 0.5 / 20.0).epsilon(1e-9));
        CHECK_THROWS_AS(bcrb_wideband(20, cfg, 0.0), DomainError);
    }

    TEST_CASE("bound curve columns")
    {
        const auto spec = PdpSpec::exponential();
        const auto rh = build_covariance(spec, TapGrid::make(1.0, 3, 6));
        const std::vector<double> snr{-10.0, 0.0, 10.0};
        const auto curve = bound_curve(spec, rh, SoundingConfig{100, 1.0, 1.0, 1.0}, snr);
        REQUIRE(curve.size() == 3);
        for (const auto& pt : curve) {
            const auto cfg = SoundingConfig::from_snr_db(100, 1.0, pt.snr_db, 1.0);
            CHECK(pt.beta == doctest::Approx(crb_beta(10, cfg)));
            CHECK(pt.bcrb_eigen == doctest::Approx(pt.bcrb_exact).epsilon(1e-8));
            CHECK(pt.bcrb_wideband == doctest::Approx(bcrb_wideband(10, cfg, 1.0)));
        }
        const auto delta = build_covariance(PdpSpec::delta(), TapGrid::make(1.0, 1, 1));
        const auto dc = bound_curve(PdpSpec::delta(), delta, SoundingConfig{}, snr);
        CHECK(std::isnan(dc[0].bcrb_wideband));
    }
}
