#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wp {

namespace detail {
// splitmix64 finalizer; used to spread user seeds and derive substreams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Seeded random stream. fork(salt) derives an independent stream from the
// original seed, not from the current engine state, so replicas can be
// fanned out deterministically regardless of how much the parent has drawn.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : seed_(seed), engine_(detail::mix64(seed)) {}

    std::mt19937_64& engine() { return engine_; }
    std::uint64_t seed() const { return seed_; }

    Rng fork(std::uint64_t salt) const {
        return Rng(detail::mix64(seed_ ^ detail::mix64(salt + 0x51ed2701ULL)));
    }

    double uniform01() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    // Uniform in [0, n)
    std::uint64_t uniform_below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        return std::poisson_distribution<int>(lambda)(engine_);
    }

    int binomial(int n, double p) {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        return std::binomial_distribution<int>(n, p)(engine_);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Index into a cumulative-weight table (ascending, last entry = total mass).
    std::size_t pick_cumulative(const std::vector<double>& cum) {
        double u = uniform01() * cum.back();
        std::size_t lo = 0, hi = cum.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cum[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace wp
