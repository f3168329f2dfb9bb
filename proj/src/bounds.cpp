#include "tdl/bounds.hpp"

#include "tdl/errors.hpp"
#include "tdl/parallel.hpp"
#include "tdl/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace tdl {

namespace {

void check_config(const SoundingConfig& cfg)
{
    if (cfg.n_obs == 0) throw DomainError("sounding config: N must be at least 1");
    if (!(cfg.px > 0.0)) throw DomainError("sounding config: Px must be positive");
    if (!(cfg.sigma_w2 > 0.0)) throw DomainError("sounding config: sigma_w^2 must be positive");
    if (!(cfg.bandwidth > 0.0)) throw DomainError("sounding config: B must be positive");
}

} // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SoundingConfig SoundingConfig::from_snr_db(std::size_t n_obs, double px, double snr_db,
                                           double bandwidth)
{
    SoundingConfig cfg{n_obs, px, px / db_to_linear(snr_db), bandwidth};
    check_config(cfg);
    return cfg;
}

Eigen::MatrixXd fim_from_pilot(const PilotSequence& x, const TapGrid& grid,
                               const SoundingConfig& cfg)
{
    check_config(cfg);
    const auto n = static_cast<std::int64_t>(cfg.n_obs);
    if (!x.covers(1 - grid.l2, n + grid.l1)) {
        std::ostringstream msg;
        msg << "fim_from_pilot: pilot covers [" << x.first_index << ", " << x.last_index()
            << "] but the model needs [" << 1 - grid.l2 << ", " << n + grid.l1 << "]";
        throw RangeError(msg.str());
    }
    const int taps = grid.size();
    Eigen::MatrixXd fim(taps, taps);
    for (int a = 0; a < taps; ++a) {
        const int l = grid.first() + a;
        for (int b = a; b < taps; ++b) {
            const int p = grid.first() + b;
            std::complex<double> acc{};
            for (std::int64_t m = 1; m <= n; ++m) acc += std::conj(x[m - l]) * x[m - p];
            fim(a, b) = acc.real() / cfg.sigma_w2;
            fim(b, a) = fim(a, b);
        }
    }
    return fim;
}

Eigen::MatrixXd fim_toeplitz(std::span<const std::complex<double>> lags, const SoundingConfig& cfg,
                             int taps)
{
    check_config(cfg);
    if (taps < 1) throw DomainError("fim_toeplitz: need at least one tap");
    if (lags.size() < static_cast<std::size_t>(taps)) {
        throw RangeError("fim_toeplitz: need lags up to " + std::to_string(taps - 1));
    }
    const double scale = static_cast<double>(cfg.n_obs) / cfg.sigma_w2;
    Eigen::MatrixXd fim(taps, taps);
    for (int a = 0; a < taps; ++a) {
        for (int b = 0; b < taps; ++b) {
            fim(a, b) = scale * lags[static_cast<std::size_t>(std::abs(b - a))].real();
        }
    }
    return fim;
}

double crb_trace(const Eigen::MatrixXd& fim)
{
    const Eigen::LLT<Eigen::MatrixXd> llt(fim);
    if (llt.info() != Eigen::Success) {
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                   fim, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();
        std::ostringstream msg;
        msg << "crb_trace: FIM is not positive definite (min eigenvalue " << min_eig << ")";
        throw ConditioningError(msg.str(), min_eig);
    }
    // tr(J^{-1}) = ||L^{-1}||_F^2 for J = L L^T.
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(fim.rows(), fim.cols());
    const Eigen::MatrixXd l_inv = llt.matrixL().solve(identity);
    return l_inv.squaredNorm();
}

double asymptotic_per_tap_crb(const std::function<double(double)>& psd, const SoundingConfig& cfg)
{
    check_config(cfg);
    const double fs = cfg.fs();
    double min_seen = std::numeric_limits<double>::infinity();
    auto integrand = [&](double f) {
        const double s = psd(f);
        min_seen = std::min(min_seen, s);
        return s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity();
    };
    quad::Options opts;
    opts.rel_tol = 1e-8;
    opts.abs_tol = 0.0;
    opts.max_panel_width = fs / 16.0;
    const auto result = quad::integrate(integrand, -0.5 * fs, 0.5 * fs, opts);
    if (!(min_seen > 0.0)) {
        std::ostringstream msg;
        msg << "asymptotic_per_tap_crb: spectrum reaches " << min_seen << "; it must stay positive";
        throw DomainError(msg.str());
    }
    if (!result.converged) {
        throw AccuracyError("asymptotic_per_tap_crb: quadrature did not converge", result.value,
                            result.error);
    }
    return (1.0 / fs) * (cfg.sigma_w2 / static_cast<double>(cfg.n_obs)) * result.value;
}

double crb_beta(int taps, const SoundingConfig& cfg)
{
    check_config(cfg);
    if (taps < 1) throw DomainError("crb_beta: L must be at least 1");
    return taps / cfg.n_snr();
}

double bcrb_trace(const TapCovariance& rh, const SoundingConfig& cfg)
{
    check_config(cfg);
    const double s = cfg.n_snr();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rh.eigenvalues.size(); ++i) {
        const double lambda = rh.eigenvalues(i);
        sum += lambda / (s * lambda + 1.0);
    }
    return sum;
}

double bcrb_exact(const TapCovariance& rh, const SoundingConfig& cfg)
{
    check_config(cfg);
    const Eigen::Index n = rh.matrix.rows();
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) + cfg.n_snr() * rh.matrix;
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
    if (ldlt.info() != Eigen::Success) {
        throw ConditioningError("bcrb_exact: I + N SNR R is not positive definite", 0.0);
    }
    return ldlt.solve(rh.matrix).trace().real();
}

double bfim_trace(const Eigen::MatrixXd& fim, const TapCovariance& rh)
{
    const Eigen::Index n = rh.matrix.rows();
    if (fim.rows() != n || fim.cols() != n) {
        throw ContractViolation("bfim_trace: FIM and covariance sizes differ");
    }
    const Eigen::MatrixXcd g = rh.factor();
    const Eigen::MatrixXcd inner =
        Eigen::MatrixXcd::Identity(n, n) + g.adjoint() * fim.cast<std::complex<double>>() * g;
    const Eigen::LLT<Eigen::MatrixXcd> llt(inner);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("bfim_trace: I + G^H J G is not positive definite", 0.0);
    }
    return llt.solve(g.adjoint() * g).trace().real();
}

double bcrb_taylor_check(const TapCovariance& rh, const SoundingConfig& cfg, int terms)
{
    check_config(cfg);
    if (terms < 0) throw DomainError("bcrb_taylor_check: terms must be nonnegative");
    const double s = cfg.n_snr();
    for (Eigen::Index i = 0; i < rh.eigenvalues.size(); ++i) {
        if (!(rh.eigenvalues(i) > 1.0 / s)) {
            std::ostringstream msg;
            msg << "bcrb_taylor_check: series diverges, lambda_" << i << " = "
                << rh.eigenvalues(i) << " is not above 1/(N SNR) = " << 1.0 / s;
            throw DomainError(msg.str());
        }
    }
    const Eigen::Index n = rh.matrix.rows();
    const Eigen::LLT<Eigen::MatrixXcd> llt(rh.matrix);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("bcrb_taylor_check: R_h is not positive definite",
                                rh.min_raw_eigenvalue);
    }
    const Eigen::MatrixXcd step =
        -llt.solve(Eigen::MatrixXcd::Identity(n, n)) / s;

    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(n, n);
    double sum = static_cast<double>(n);
    for (int k = 1; k <= terms; ++k) {
        power = power * step;
        sum += power.trace().real();
    }
    return sum / s;
}

double bcrb_wideband(int taps, const SoundingConfig& cfg, double ph0)
{
    check_config(cfg);
    if (taps < 1) throw DomainError("bcrb_wideband: L must be at least 1");
    if (!(ph0 > 0.0)) throw DomainError("bcrb_wideband: P_h(0) must be positive");
    return taps / (cfg.n_snr() + 2.0 * cfg.bandwidth / ph0);
}

BoundCurve bound_curve(const PdpSpec& spec, const TapCovariance& rh, const SoundingConfig& base,
                       std::span<const double> snr_db, unsigned threads)
{
    const double ph0 = spec.kind == PdpKind::DeltaTest
                           ? std::numeric_limits<double>::quiet_NaN()
                           : pdp_value(spec, 0.0);
    BoundCurve curve(snr_db.size());
    parallel_for(
        snr_db.size(),
        [&](std::size_t i) {
            try {
                const auto cfg = SoundingConfig::from_snr_db(base.n_obs, base.px, snr_db[i],
                                                             base.bandwidth);
                BoundPoint& pt = curve[i];
                pt.snr_db = snr_db[i];
                pt.snr = cfg.snr();
                pt.beta = crb_beta(rh.size(), cfg);
                pt.bcrb_exact = bcrb_exact(rh, cfg);
                pt.bcrb_eigen = bcrb_trace(rh, cfg);
                pt.bcrb_wideband = std::isnan(ph0) ? ph0 : bcrb_wideband(rh.size(), cfg, ph0);
            } catch (const Error& e) {
                std::ostringstream msg;
                msg << "bound_curve at " << snr_db[i] << " dB: " << e.what();
                throw Error(e.category(), msg.str());
            }
        },
        threads);
    return curve;
}

} // namespace tdl
