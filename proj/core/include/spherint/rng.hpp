#pragma once

#include <cmath>
#include <cstdint>

namespace spherint {

// Counter-based uniform generator: output n is a pure function of
// (key, n), so a stream can be split into independent substreams that
// replay identically regardless of execution order or thread count.
// The mix is the splitmix64 finalizer over key + n*golden.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) {
        key_ = mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
        key_ = mix(key_ ^ (stream << 1 | 1));
    }

    std::uint64_t next_u64() {
        return mix(key_ + 0x9E3779B97F4A7C15ull * ++ctr_);
    }

    // uniform in [0,1), 53-bit resolution
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27; z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// Standard normals via the Marsaglia polar method; generates pairs and
// caches the spare.  Deterministic given the underlying counter stream.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed, std::uint64_t stream = 0)
        : rng_(seed, stream) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.next_unit() - 1.0;
            v = 2.0 * rng_.next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    CounterRng rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace spherint
