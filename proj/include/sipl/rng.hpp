#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace sipl {

/// Seedable, splittable generator. Child streams are derived by hashing
/// the parent seed with stream ids, so they do not depend on how many
/// numbers the parent has drawn.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Deterministic stream for (master, a, b), e.g. (seed, task id, episode id).
    static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

    Rng split(std::uint64_t stream) const { return derive(seed_, stream); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);
    /// Index drawn from unnormalized nonnegative weights.
    std::size_t categorical(std::span<const double> weights);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace sipl
