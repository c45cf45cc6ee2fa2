#ifndef GRAPHROB_RNG_HPP
#define GRAPHROB_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace graphrob {

/// Deterministic random stream. All draws are derived from the raw 64-bit
/// output of mt19937_64 (fully specified by the standard), so sequences are
/// reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Index drawn with probability proportional to weights[i]. The total
    /// weight must be positive; zero-weight entries are never returned.
    std::size_t weighted_index(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = next_unit() * total;
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last_positive = i;
            r -= weights[i];
            if (r < 0.0) return i;
        }
        return last_positive;  // guards against fp undershoot at the tail
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Splittable counter-based seed derivation: each (master, path) pair maps to
/// an independent stream seed.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = detail::splitmix64(master);
    for (std::uint64_t p : path) s = detail::splitmix64(s ^ p);
    return s;
}

}  // namespace graphrob

#endif
