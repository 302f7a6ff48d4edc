// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace qrn {

/// splitmix64 finalizer; derives independent per-item seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

/**
 * @brief Deterministic PRNG with a fully specified value mapping.
 *
 * std::mt19937_64 supplies the raw 64-bit stream. The derived draws below
 * avoid the std:: distribution classes, whose output is implementation
 * defined, so identical seeds give identical streams on every platform.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const auto wide = static_cast<unsigned __int128>(next()) * span;
        return lo + static_cast<std::int64_t>(wide >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace qrn
