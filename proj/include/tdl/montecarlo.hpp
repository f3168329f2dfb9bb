#pragma once

#include "tdl/bounds.hpp"
#include "tdl/covariance.hpp"
#include "tdl/pilots.hpp"
#include "tdl/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tdl {

/// h = U sqrt(Lambda) z with z i.i.d. unit circular normal.
Eigen::VectorXcd draw_channel(const TapCovariance& rh, rng::Stream& stream);

/// N x L matrix with X(i, l) = x_{i-l}, rows i = 1..N, taps l = -L1..L2.
Eigen::MatrixXcd build_convolution_matrix(const PilotSequence& x, const TapGrid& grid,
                                          std::size_t n_obs);

/// y = X h + w with w i.i.d. circular normal of variance sigma_w^2.
Eigen::VectorXcd synthesize_observation(const Eigen::MatrixXcd& x, const Eigen::VectorXcd& h,
                                        double sigma_w2, rng::Stream& stream);

Eigen::VectorXcd ls_estimate(const Eigen::MatrixXcd& x, const Eigen::VectorXcd& y);

/// sigma_w^2 tr((X^H X)^{-1}), the exact MSE of least squares.
double ls_theoretical_mse(const Eigen::MatrixXcd& x, double sigma_w2);

/// R X^H (X R X^H + sigma_w^2 I)^{-1} y; R may be singular.
Eigen::VectorXcd mmse_estimate(const Eigen::MatrixXcd& x, const Eigen::VectorXcd& y,
                               const Eigen::MatrixXcd& rh, double sigma_w2);

/// tr(R - R X^H (X R X^H + sigma_w^2 I)^{-1} X R): exact Bayesian MSE of the
/// MMSE estimator for this particular X.
double mmse_theoretical_mse(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& rh,
                            double sigma_w2);

/// Least squares with the QR factorization of X computed once.
class LsEstimator
{
public:
    /// Throws ConditioningError if X lacks full column rank.
    explicit LsEstimator(const Eigen::MatrixXcd& x);
    Eigen::VectorXcd operator()(const Eigen::VectorXcd& y) const;

private:
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
};

/// MMSE estimator with the L x N gain matrix computed once.
class MmseEstimator
{
public:
    MmseEstimator(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& rh, double sigma_w2);
    Eigen::VectorXcd operator()(const Eigen::VectorXcd& y) const { return gain_ * y; }
    const Eigen::MatrixXcd& gain() const { return gain_; }

private:
    Eigen::MatrixXcd gain_;
};

enum class Estimator
{
    LS,
    MMSE,
};

std::string_view to_string(Estimator e);
/// "ls" or "mmse"; throws UsageError.
Estimator parse_estimator(std::string_view name);

struct TrialConfig
{
    SoundingConfig cfg;
    TapGrid grid;
    PilotKind pilot_kind = PilotKind::Chu;
    std::uint64_t pilot_seed = 1;
    /// Used instead of a generated pilot when set.
    std::optional<PilotSequence> pilot;
    /// Keys the per-trial substreams.
    std::uint64_t master_seed = 1;
    std::size_t n_trials = 1000;
    std::vector<Estimator> estimators{Estimator::LS, Estimator::MMSE};
    bool keep_per_trial = false;
    /// 0 = all cores.
    unsigned threads = 0;
};

struct EstimatorStats
{
    Estimator estimator = Estimator::LS;
    /// Mean over trials of sum_l |h_l - hat h_l|^2.
    double mse = 0.0;
    /// Standard error of that mean.
    double stderr_mse = 0.0;
    std::size_t trials = 0;
    /// Finite-sample theory for the pilot used: LS or MMSE exact MSE.
    double theoretical_mse = 0.0;
    /// Squared error of each trial, when requested.
    std::vector<double> per_trial;
};

struct SimResult
{
    std::vector<EstimatorStats> stats;
    double wall_seconds = 0.0;

    const EstimatorStats& get(Estimator e) const;
};

/// Pilot fixed across trials; channel and noise redrawn per trial from the
/// substream (master_seed, trial index). Results do not depend on the
/// thread count.
SimResult run_trials(const TrialConfig& tc, const TapCovariance& rh);

/// Pairwise summation.
double pairwise_sum(std::span<const double> values);

} // namespace tdl
