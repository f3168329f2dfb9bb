#include "tdl/rng.hpp"

#include <cmath>
#include <numbers>

namespace tdl::rng {

namespace {

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t index, Domain domain)
{
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(index), hi(index),
                      static_cast<std::uint32_t>(domain), 0x7d1b5a3fu};
    return std::mt19937_64(seq);
}

} // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t index, Domain domain)
    : engine_(keyed_engine(seed, index, domain))
{
}

double Stream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open_low()
{
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

std::complex<double> Stream::complex_normal()
{
    // Box-Muller in polar form: |z|^2 is Exp(1), the phase is uniform.
    const double radius = std::sqrt(-std::log(uniform_open_low()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return std::polar(radius, phase);
}

} // namespace tdl::rng
