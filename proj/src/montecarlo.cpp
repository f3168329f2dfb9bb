#include "tdl/montecarlo.hpp"

#include "tdl/errors.hpp"
#include "tdl/parallel.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

namespace tdl {

namespace {

Eigen::VectorXcd normal_vector(Eigen::Index n, rng::Stream& stream)
{
    Eigen::VectorXcd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = stream.complex_normal();
    return z;
}

double squared_error(const Eigen::VectorXcd& h, const Eigen::VectorXcd& estimate)
{
    return (h - estimate).squaredNorm();
}

} // namespace

Eigen::VectorXcd draw_channel(const TapCovariance& rh, rng::Stream& stream)
{
    return rh.factor() * normal_vector(rh.size(), stream);
}

Eigen::MatrixXcd build_convolution_matrix(const PilotSequence& x, const TapGrid& grid,
                                          std::size_t n_obs)
{
    const auto n = static_cast<std::int64_t>(n_obs);
    if (n_obs == 0) throw DomainError("convolution matrix: N must be at least 1");
    if (!x.covers(1 - grid.l2, n + grid.l1)) {
        std::ostringstream msg;
        msg << "convolution matrix: pilot covers [" << x.first_index << ", " << x.last_index()
            << "] but rows 1.." << n << " need [" << 1 - grid.l2 << ", " << n + grid.l1 << "]";
        throw RangeError(msg.str());
    }
    Eigen::MatrixXcd out(n, grid.size());
    for (std::int64_t i = 1; i <= n; ++i) {
        for (int l = grid.first(); l <= grid.last(); ++l) {
            out(i - 1, grid.slot(l)) = x[i - l];
        }
    }
    return out;
}

Eigen::VectorXcd synthesize_observation(const Eigen::MatrixXcd& x, const Eigen::VectorXcd& h,
                                        double sigma_w2, rng::Stream& stream)
{
    if (x.cols() != h.size()) throw ContractViolation("synthesize_observation: shape mismatch");
    if (sigma_w2 < 0.0) throw DomainError("synthesize_observation: sigma_w^2 must be >= 0");
    Eigen::VectorXcd y = x * h;
    if (sigma_w2 > 0.0) y += std::sqrt(sigma_w2) * normal_vector(x.rows(), stream);
    return y;
}

LsEstimator::LsEstimator(const Eigen::MatrixXcd& x) : qr_(x)
{
    if (qr_.rank() < x.cols()) {
        std::ostringstream msg;
        msg << "least squares: X has rank " << qr_.rank() << " < L = " << x.cols();
        throw ConditioningError(msg.str(), 0.0);
    }
}

Eigen::VectorXcd LsEstimator::operator()(const Eigen::VectorXcd& y) const { return qr_.solve(y); }

Eigen::VectorXcd ls_estimate(const Eigen::MatrixXcd& x, const Eigen::VectorXcd& y)
{
    if (x.rows() != y.size()) throw ContractViolation("ls_estimate: shape mismatch");
    return LsEstimator(x)(y);
}

double ls_theoretical_mse(const Eigen::MatrixXcd& x, double sigma_w2)
{
    const Eigen::MatrixXcd gram = x.adjoint() * x;
    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success) {
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
                                   gram, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();
        throw ConditioningError("ls_theoretical_mse: X^H X is singular", min_eig);
    }
    const Eigen::MatrixXcd l_inv =
        llt.matrixL().solve(Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
    return sigma_w2 * l_inv.squaredNorm();
}

MmseEstimator::MmseEstimator(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& rh,
                             double sigma_w2)
{
    if (x.cols() != rh.rows()) throw ContractViolation("mmse: X and R_h sizes differ");
    const Eigen::MatrixXcd xr = x * rh;
    Eigen::MatrixXcd inner = xr * x.adjoint();
    inner.diagonal().array() += sigma_w2;
    const Eigen::LLT<Eigen::MatrixXcd> llt(inner);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("mmse: X R X^H + sigma_w^2 I is not positive definite", 0.0);
    }
    // R X^H A^{-1} = (A^{-1} X R)^H because A and R are Hermitian.
    gain_ = llt.solve(xr).adjoint();
}

Eigen::VectorXcd mmse_estimate(const Eigen::MatrixXcd& x, const Eigen::VectorXcd& y,
                               const Eigen::MatrixXcd& rh, double sigma_w2)
{
    if (x.rows() != y.size()) throw ContractViolation("mmse_estimate: shape mismatch");
    return MmseEstimator(x, rh, sigma_w2)(y);
}

double mmse_theoretical_mse(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& rh,
                            double sigma_w2)
{
    const MmseEstimator est(x, rh, sigma_w2);
    return (rh - est.gain() * x * rh).trace().real();
}

std::string_view to_string(Estimator e)
{
    return e == Estimator::LS ? "ls" : "mmse";
}

Estimator parse_estimator(std::string_view name)
{
    if (name == "ls" || name == "LS") return Estimator::LS;
    if (name == "mmse" || name == "MMSE") return Estimator::MMSE;
    throw UsageError("estimator: unknown '" + std::string(name) + "' (expected ls|mmse)");
}

const EstimatorStats& SimResult::get(Estimator e) const
{
    for (const auto& s : stats) {
        if (s.estimator == e) return s;
    }
    throw ContractViolation("SimResult: estimator " + std::string(to_string(e)) + " was not run");
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SimResult run_trials(const TrialConfig& tc, const TapCovariance& rh)
{
    const auto start = std::chrono::steady_clock::now();
    if (tc.n_trials == 0) throw DomainError("run_trials: n_trials must be at least 1");
    if (tc.estimators.empty()) throw DomainError("run_trials: no estimator selected");
    if (rh.size() != tc.grid.size()) {
        throw ContractViolation("run_trials: covariance and grid sizes differ");
    }

    const PilotSequence pilot =
        tc.pilot ? *tc.pilot
                 : sounding_pilot(tc.pilot_kind, tc.grid, tc.cfg.n_obs, tc.cfg.px, tc.pilot_seed);
    const Eigen::MatrixXcd x = build_convolution_matrix(pilot, tc.grid, tc.cfg.n_obs);
    const Eigen::MatrixXcd factor = rh.factor();
    const double sigma_w2 = tc.cfg.sigma_w2;

    std::optional<LsEstimator> ls;
    std::optional<MmseEstimator> mmse;
    for (Estimator e : tc.estimators) {
        if (e == Estimator::LS && !ls) {
            if (tc.cfg.n_obs < static_cast<std::size_t>(tc.grid.size())) {
                throw DomainError("run_trials: least squares needs N >= L");
            }
            ls.emplace(x);
        }
        if (e == Estimator::MMSE && !mmse) mmse.emplace(x, rh.matrix, sigma_w2);
    }

    const std::size_t n_est = tc.estimators.size();
    std::vector<std::vector<double>> errors(n_est, std::vector<double>(tc.n_trials));
    parallel_for(
        tc.n_trials,
        [&](std::size_t trial) {
            rng::Stream stream(tc.master_seed, trial, rng::Domain::Trial);
            const Eigen::VectorXcd h = factor * normal_vector(factor.cols(), stream);
            const Eigen::VectorXcd y = synthesize_observation(x, h, sigma_w2, stream);
            for (std::size_t k = 0; k < n_est; ++k) {
                const Eigen::VectorXcd estimate =
                    tc.estimators[k] == Estimator::LS ? (*ls)(y) : (*mmse)(y);
                errors[k][trial] = squared_error(h, estimate);
            }
        },
        tc.threads);

    SimResult result;
    const double n = static_cast<double>(tc.n_trials);
    for (std::size_t k = 0; k < n_est; ++k) {
        EstimatorStats s;
        s.estimator = tc.estimators[k];
        s.trials = tc.n_trials;
        s.mse = pairwise_sum(errors[k]) / n;
        if (tc.n_trials > 1) {
            std::vector<double> dev(errors[k].size());
            for (std::size_t i = 0; i < dev.size(); ++i) {
                const double d = errors[k][i] - s.mse;
                dev[i] = d * d;
            }
            s.stderr_mse = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
        }
        s.theoretical_mse = s.estimator == Estimator::LS
                                ? ls_theoretical_mse(x, sigma_w2)
                                : mmse_theoretical_mse(x, rh.matrix, sigma_w2);
        if (tc.keep_per_trial) s.per_trial = std::move(errors[k]);
        result.stats.push_back(std::move(s));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace tdl
