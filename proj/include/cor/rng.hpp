#pragma once

#include <cmath>
#include <cstdint>

namespace cor {

// splitmix64. Chosen over std engines so that streams are bit-reproducible
// across standard library implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // inclusive range
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    // Box-Muller; one value per call, the mate is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Independent child stream derived from a parent seed and an index.
inline uint64_t derive_seed(uint64_t parent, uint64_t stream) {
    Rng r(parent ^ (0xd1342543de82ef95ULL * (stream + 1)));
    return r.next_u64();
}

}  // namespace cor
