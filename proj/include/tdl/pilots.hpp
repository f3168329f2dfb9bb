#pragma once

#include "tdl/covariance.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tdl {

enum class PilotKind
{
    /// sqrt(Px) * exp(j phi), phi i.i.d. uniform on [0, 2 pi).
    ConstantModulusRandomPhase,
    /// i.i.d. circular complex normal with variance Px.
    GaussianWhite,
    /// Periodic Zadoff-Chu sequence: constant modulus and zero periodic
    /// autocorrelation at every nonzero lag.
    Chu,
    /// Loaded from a file.
    External,
};

std::string_view to_string(PilotKind kind);
/// "constant_modulus", "gaussian", "chu"; throws UsageError.
PilotKind parse_pilot_kind(std::string_view name);

/// Pilot samples x_n for n in [first_index, first_index + size).
///
/// The received samples follow y_n = sum_l h_l x_{n-l}, so the convolution
/// matrix entry for row i and tap l is x_{i-l}. (The index map
/// X_{i,j} = x_{i+j+L1-1} that sometimes accompanies this model does not
/// agree with that sum; this library follows the sum.)
struct PilotSequence
{
    PilotKind kind = PilotKind::External;
    std::int64_t first_index = 0;
    std::vector<std::complex<double>> samples;
    /// Average statistical power.
    double px = 1.0;
    /// Sample rate, 2B.
    double fs = 1.0;

    std::size_t size() const { return samples.size(); }
    std::int64_t last_index() const
    {
        return first_index + static_cast<std::int64_t>(samples.size()) - 1;
    }
    bool covers(std::int64_t lo, std::int64_t hi) const
    {
        return lo >= first_index && hi <= last_index();
    }
    /// x_n; throws RangeError outside the stored range.
    std::complex<double> at(std::int64_t n) const;
    std::complex<double> operator[](std::int64_t n) const
    {
        return samples[static_cast<std::size_t>(n - first_index)];
    }
};

/// Deterministic in (kind, length, px, seed). Chu sequences use the whole
/// length as their period; use chu_pilot for other periods.
PilotSequence gen_pilot(PilotKind kind, std::size_t length, double px, std::uint64_t seed,
                        std::int64_t first_index = 0, double fs = 1.0);

/// Zadoff-Chu root 1 of the given period, sampled on
/// [first_index, first_index + length).
PilotSequence chu_pilot(std::size_t period, std::size_t length, double px,
                        std::int64_t first_index = 0, double fs = 1.0);

/// Pilot covering n in [1 - L2, N + L1], every sample the observation model
/// touches. Chu pilots get period N, which makes the tap columns exactly
/// orthogonal for N > L.
PilotSequence sounding_pilot(PilotKind kind, const TapGrid& grid, std::size_t n_obs, double px,
                             std::uint64_t seed);

/// R[k] = (1/M) sum_m x_m^* x_{m+k} over the M = size - k valid products,
/// for k = 0..maxlag. Throws RangeError unless maxlag < size / 2.
std::vector<std::complex<double>> sample_autocorr(const PilotSequence& x, std::size_t maxlag);

/// Truncated DTFT sum_k R[k] exp(-j 2 pi f k / fs) from one-sided lags
/// R[0..K], with R[-k] = conj(R[k]).
double folded_psd(std::span<const std::complex<double>> lags, double f, double fs);

/// Same, from two-sided lags R[-K..K] (size 2K + 1, centre at K). Throws
/// ContractViolation if the lags are not Hermitian-symmetric to 1e-9.
double folded_psd_two_sided(std::span<const std::complex<double>> lags, double f, double fs);

} // namespace tdl
