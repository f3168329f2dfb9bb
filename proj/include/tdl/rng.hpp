#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace tdl::rng {

/// Independent purposes drawing from the same master seed.
enum class Domain : std::uint32_t
{
    Pilot = 1,
    Trial = 2,
    Test = 3,
};

/// A reproducible random substream keyed by (seed, index, domain).
///
/// The key is expanded through std::seed_seq into a fresh mt19937_64 state,
/// so the stream for trial k is the same no matter which thread draws it or
/// how many other streams exist.
class Stream
{
public:
    Stream(std::uint64_t seed, std::uint64_t index, Domain domain = Domain::Trial);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1].
    double uniform_open_low();

    /// Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal();

private:
    std::mt19937_64 engine_;
};

} // namespace tdl::rng
