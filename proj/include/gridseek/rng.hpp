#pragma once

#include <cstdint>
#include <vector>

namespace gridseek {

// Deterministic RNG with hand-rolled draw helpers. std:: distributions are
// implementation-defined, so traces would not reproduce across standard
// libraries; this keeps episode generation portable.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x9e3779b97f4a7c15ull)) {}

    uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }

    // Uniform in [0, n) via rejection sampling.
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

    int range(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return uniform() < p; }

    // Index draw proportional to nonnegative weights; -1 if all zero.
    int weighted(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) return -1;
        double r = uniform() * total;
        for (size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    static uint64_t splitmix64(uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Stable derivation of per-episode substream seeds.
    static uint64_t mix(uint64_t seed, uint64_t stream) {
        return splitmix64(seed * 0x2545f4914f6cdd1dull + stream);
    }

private:
    uint64_t state_;
};

}  // namespace gridseek
