#pragma once

#include "tdl/covariance.hpp"
#include "tdl/pdp.hpp"
#include "tdl/pilots.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tdl {

/// Sounding parameters shared by every bound: N processed samples, pilot
/// power Px, noise sample variance sigma_w^2 = 4 N0 B, bandwidth B.
struct SoundingConfig
{
    std::size_t n_obs = 100;
    double px = 1.0;
    double sigma_w2 = 1.0;
    double bandwidth = 1.0;

    double snr() const { return px / sigma_w2; }
    double fs() const { return 2.0 * bandwidth; }
    /// N * SNR, the per-tap information of a flat-spectrum pilot.
    double n_snr() const { return static_cast<double>(n_obs) * snr(); }

    /// Validates and fills sigma_w^2 = Px / 10^(snr_db / 10).
    static SoundingConfig from_snr_db(std::size_t n_obs, double px, double snr_db,
                                      double bandwidth);
};

double db_to_linear(double db);

/// J_C[l, p] = Re{sum_{m=1..N} x*_{m-l} x_{m-p}} / sigma_w^2 over the grid.
/// Throws RangeError when the pilot does not cover [1 - L2, N + L1].
Eigen::MatrixXd fim_from_pilot(const PilotSequence& x, const TapGrid& grid,
                               const SoundingConfig& cfg);

/// Toeplitz FIM with first row (N / sigma_w^2) Re R[0..L-1].
Eigen::MatrixXd fim_toeplitz(std::span<const std::complex<double>> lags, const SoundingConfig& cfg,
                             int taps);

/// tr(J^{-1}) through a Cholesky factor. Throws ConditioningError (with the
/// smallest eigenvalue) if J is not symmetric positive definite.
double crb_trace(const Eigen::MatrixXd& fim);

/// Ts (sigma_w^2 / N) integral over (-fs/2, fs/2) of df / S(f); the
/// large-L per-tap CRB for a pilot with folded spectrum S. Throws
/// DomainError if S is not positive wherever it is sampled.
double asymptotic_per_tap_crb(const std::function<double(double)>& psd,
                              const SoundingConfig& cfg);

/// L / (N SNR), the CRB of a flat-spectrum pilot.
double crb_beta(int taps, const SoundingConfig& cfg);

/// sum_i lambda_i / (N SNR lambda_i + 1): the Bayesian bound for a
/// flat-spectrum pilot, written so zero eigenvalues contribute zero.
double bcrb_trace(const TapCovariance& rh, const SoundingConfig& cfg);

/// tr((N SNR I + R^{-1})^{-1}) evaluated as tr((I + N SNR R)^{-1} R) with an
/// LDLT factorization; no eigenvalues and no inverse of R.
double bcrb_exact(const TapCovariance& rh, const SoundingConfig& cfg);

/// tr((J_C + R^{-1})^{-1}) for an arbitrary FIM, i.e. the Bayesian bound
/// for a pilot that is not spectrally flat. Uses R = G G^H so singular R is
/// fine: the trace is tr((I + G^H J_C G)^{-1} G^H G).
double bfim_trace(const Eigen::MatrixXd& fim, const TapCovariance& rh);

/// Partial sum over k = 0..terms of (1 / N SNR) tr((-R^{-1} / N SNR)^k),
/// using matrix powers. Requires lambda_i > 1 / (N SNR) for all i; throws
/// DomainError naming the first offender.
double bcrb_taylor_check(const TapCovariance& rh, const SoundingConfig& cfg, int terms);

/// L / (N SNR + 2B / P_h(0)), the uncorrelated-tap approximation.
double bcrb_wideband(int taps, const SoundingConfig& cfg, double ph0);

struct BoundPoint
{
    double snr_db = 0.0;
    double snr = 0.0;
    double beta = 0.0;
    double bcrb_exact = 0.0;
    double bcrb_eigen = 0.0;
    double bcrb_wideband = 0.0;
};

using BoundCurve = std::vector<BoundPoint>;

/// Evaluates all bounds at each SNR. `base` supplies N, Px and B; its
/// sigma_w^2 is replaced per point. The wideband column needs P_h(0) and is
/// NaN for the delta profile.
BoundCurve bound_curve(const PdpSpec& spec, const TapCovariance& rh, const SoundingConfig& base,
                       std::span<const double> snr_db, unsigned threads = 0);

} // namespace tdl
