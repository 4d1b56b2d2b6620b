#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace ridepool {

// Stream ids used by the simulator. Kept stable so event logs can name them.
inline constexpr std::uint64_t kStreamInit = 1;     // fleet placement
inline constexpr std::uint64_t kStreamDemand = 2;   // arrivals and max-wait draws
inline constexpr std::uint64_t kStreamMobility = 3; // vacant-vehicle random walk

// mt19937_64 behind hand-rolled distributions. The standard library's
// distribution objects are implementation-defined, so we draw uniforms
// ourselves and map them; a (seed, stream) pair then reproduces the same
// sequence on any build of this project.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32)};
        gen_.seed(seq);
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    double normal(double mean, double sd) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sd * spare_;
        }
        double u1, u2, s;
        do {
            u1 = 2.0 * uniform01() - 1.0;
            u2 = 2.0 * uniform01() - 1.0;
            s = u1 * u1 + u2 * u2;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = u2 * f;
        have_spare_ = true;
        return mean + sd * (u1 * f);
    }

    // [0, n), unbiased
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    static const char* algorithm_name() { return "mt19937_64:polar-normal,invcdf-exp"; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ridepool
