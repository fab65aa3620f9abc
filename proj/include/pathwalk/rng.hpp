#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pathwalk {

// Counter-based random stream: output k is a pure function of (seed, k),
// so identical seeds give bit-identical sequences regardless of history.
// Underlying generator is splitmix64 over the counter; normals come from
// Box-Muller with the spare value cached.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(mix(seed ^ 0x8f1bbcdcbfa53e0bULL)) {}

    std::uint64_t next_u64() {
        std::uint64_t x = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
        return mix(x);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite
        double u1 = 1.0 - uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Independent child stream, e.g. one per chain.
    RandomStream spawn(std::uint64_t stream_index) const {
        return RandomStream(mix(seed_ + 0xd1342543de82ef95ULL * (stream_index + 1)));
    }

    std::uint64_t state_seed() const { return seed_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pathwalk
