/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include <array>
#include <cstdint>

namespace emscan {

/// Counter-based pseudo-random stream (splitmix64 finalizer over an
/// incrementing Weyl sequence). Every randomized operation in the toolkit
/// takes an explicit seed or stream so runs replay bit-identically, and
/// independent streams for parallel workers are derived with split().
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ULL;
        return mix(state);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint8_t next_byte() { return static_cast<std::uint8_t>(next_u64() >> 56); }

    std::array<std::uint8_t, 16> next_block() {
        std::array<std::uint8_t, 16> b{};
        for (auto &v : b)
            v = next_byte();
        return b;
    }

    /// Standard normal via Box-Muller; the spare value is cached, so one
    /// stream yields a fixed sequence regardless of call grouping.
    double next_normal();

    double next_normal(double mean, double sigma) {
        return mean + sigma * next_normal();
    }

    /// Child stream decorrelated from this one; split(id) is a pure function
    /// of (seed, id), so workers can be assigned streams in any order.
    Rng split(std::uint64_t stream_id) const {
        return Rng(mix(state ^ mix(stream_id + 0x632be59bd9b4e019ULL)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;
};

} // namespace emscan
