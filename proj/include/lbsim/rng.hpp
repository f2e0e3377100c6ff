#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lbsim {

// 64-bit mixing finalizer from splitmix64 (Vigna 2015, public domain
// constants). Used both to derive substream seeds and as the generator's
// output function.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// One named substream per stochastic purpose of a run.
enum class StreamPurpose : std::uint64_t {
    Interarrival = 1,
    Service = 2,
    TieBreak = 3,
};

// splitmix64 stream whose initial counter is a hash of
// (master_seed, purpose). The same pair always reproduces the same
// sequence; different purposes land in unrelated regions of the cycle.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, StreamPurpose purpose)
        : state_(mix64(master_seed ^
                       mix64(static_cast<std::uint64_t>(purpose) *
                             0x9E3779B97F4A7C15ULL))),
          draws_(0) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        ++draws_;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Inverse-transform exponential; consumes exactly one uniform.
    double next_exponential(double mean) {
        if (!(mean > 0.0))
            throw std::invalid_argument("exponential mean must be positive");
        return -mean * std::log1p(-next_uniform());
    }

    // Total draws consumed so far; lets tests pin per-decision RNG budgets.
    std::uint64_t draw_count() const { return draws_; }

private:
    std::uint64_t state_;
    std::uint64_t draws_;
};

}  // namespace lbsim
