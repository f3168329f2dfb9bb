#include "tdl/pilots.hpp"

#include "tdl/errors.hpp"
#include "tdl/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace tdl {

namespace {

constexpr double kPi = std::numbers::pi;

void check_pilot_args(std::size_t length, double px)
{
    if (length == 0) throw DomainError("pilot: length must be at least 1");
    if (!(px > 0.0) || !std::isfinite(px)) throw DomainError("pilot: Px must be positive");
}

} // namespace

std::string_view to_string(PilotKind kind)
{
    switch (kind) {
    case PilotKind::ConstantModulusRandomPhase: return "constant_modulus";
    case PilotKind::GaussianWhite: return "gaussian";
    case PilotKind::Chu: return "chu";
    case PilotKind::External: return "external";
    }
    return "unknown";
}

PilotKind parse_pilot_kind(std::string_view name)
{
    if (name == "constant_modulus" || name == "cm") return PilotKind::ConstantModulusRandomPhase;
    if (name == "gaussian") return PilotKind::GaussianWhite;
    if (name == "chu") return PilotKind::Chu;
    throw UsageError("pilot: unknown kind '" + std::string(name) +
                     "' (expected constant_modulus|gaussian|chu)");
}

std::complex<double> PilotSequence::at(std::int64_t n) const
{
    if (n < first_index || n > last_index()) {
        std::ostringstream msg;
        msg << "pilot: sample " << n << " outside stored range [" << first_index << ", "
            << last_index() << "]";
        throw RangeError(msg.str());
    }
    return (*this)[n];
}

PilotSequence gen_pilot(PilotKind kind, std::size_t length, double px, std::uint64_t seed,
                        std::int64_t first_index, double fs)
{
    check_pilot_args(length, px);
    if (kind == PilotKind::Chu) return chu_pilot(length, length, px, first_index, fs);
    if (kind == PilotKind::External) {
        throw UsageError("pilot: external pilots are loaded from a file, not generated");
    }

    PilotSequence seq;
    seq.kind = kind;
    seq.first_index = first_index;
    seq.px = px;
    seq.fs = fs;
    seq.samples.resize(length);
    rng::Stream stream(seed, 0, rng::Domain::Pilot);
    const double amplitude = std::sqrt(px);
    for (auto& sample : seq.samples) {
        if (kind == PilotKind::ConstantModulusRandomPhase) {
            sample = std::polar(amplitude, 2.0 * kPi * stream.uniform());
        } else {
            sample = amplitude * stream.complex_normal();
        }
    }
    return seq;
}

PilotSequence chu_pilot(std::size_t period, std::size_t length, double px,
                        std::int64_t first_index, double fs)
{
    check_pilot_args(length, px);
    if (period == 0) throw DomainError("pilot: Chu period must be at least 1");
    PilotSequence seq;
    seq.kind = PilotKind::Chu;
    seq.first_index = first_index;
    seq.px = px;
    seq.fs = fs;
    seq.samples.resize(length);
    const auto n_period = static_cast<std::int64_t>(period);
    const double amplitude = std::sqrt(px);
    for (std::size_t i = 0; i < length; ++i) {
        const std::int64_t n = first_index + static_cast<std::int64_t>(i);
        const std::int64_t m = ((n % n_period) + n_period) % n_period;
        // Reduce the quadratic phase modulo 2*period before scaling so large
        // indices keep full precision.
        const std::int64_t q = (n_period % 2 == 0) ? (m * m) % (2 * n_period)
                                                   : (m * (m + 1)) % (2 * n_period);
        seq.samples[i] = std::polar(amplitude, -kPi * static_cast<double>(q) / n_period);
    }
    return seq;
}

PilotSequence sounding_pilot(PilotKind kind, const TapGrid& grid, std::size_t n_obs, double px,
                             std::uint64_t seed)
{
    if (n_obs == 0) throw DomainError("pilot: N must be at least 1");
    const std::int64_t first = 1 - grid.l2;
    const std::size_t length = n_obs + static_cast<std::size_t>(grid.l1 + grid.l2);
    const double fs = 2.0 * grid.bandwidth;
    if (kind == PilotKind::Chu) return chu_pilot(n_obs, length, px, first, fs);
    return gen_pilot(kind, length, px, seed, first, fs);
}

std::vector<std::complex<double>> sample_autocorr(const PilotSequence& x, std::size_t maxlag)
{
    if (2 * maxlag >= x.size()) {
        throw RangeError("sample_autocorr: maxlag " + std::to_string(maxlag) +
                         " must be below half the sequence length " + std::to_string(x.size()));
    }
    std::vector<std::complex<double>> lags(maxlag + 1);
    const std::size_t n = x.size();
    for (std::size_t k = 0; k <= maxlag; ++k) {
        std::complex<double> acc{};
        for (std::size_t m = 0; m + k < n; ++m) acc += std::conj(x.samples[m]) * x.samples[m + k];
        lags[k] = acc / static_cast<double>(n - k);
    }
    return lags;
}

double folded_psd(std::span<const std::complex<double>> lags, double f, double fs)
{
    if (lags.empty()) return 0.0;
    // R[k] e^{-jwk} + conj(R[k]) e^{+jwk} = 2 Re{R[k] e^{-jwk}}.
    const double omega = 2.0 * kPi * f / fs;
    double sum = lags[0].real();
    for (std::size_t k = 1; k < lags.size(); ++k) {
        sum += 2.0 * (lags[k] * std::polar(1.0, -omega * static_cast<double>(k))).real();
    }
    return sum;
}

double folded_psd_two_sided(std::span<const std::complex<double>> lags, double f, double fs)
{
    if (lags.size() % 2 == 0) {
        throw ContractViolation("folded_psd: two-sided lags need odd length 2K+1");
    }
    const std::size_t centre = lags.size() / 2;
    for (std::size_t k = 0; k <= centre; ++k) {
        if (std::abs(lags[centre + k] - std::conj(lags[centre - k])) > 1e-9) {
            throw ContractViolation("folded_psd: lag sequence is not Hermitian at k = " +
                                    std::to_string(k));
        }
    }
    const double omega = 2.0 * kPi * f / fs;
    std::complex<double> sum{};
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const double k = static_cast<double>(i) - static_cast<double>(centre);
        sum += lags[i] * std::polar(1.0, -omega * k);
    }
    if (std::abs(sum.imag()) > 1e-9 * std::max(1.0, std::abs(sum.real()))) {
        throw ContractViolation("folded_psd: spectrum has an imaginary residue");
    }
    return sum.real();
}

} // namespace tdl
