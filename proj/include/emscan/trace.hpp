/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include "emscan/crypto.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace emscan {

struct GridCell {
    int i = 0;
    int j = 0;

    friend bool operator==(const GridCell &, const GridCell &) = default;
};

/// A batch of traces captured at one grid cell. Samples are stored row-major
/// (trace-major) as float32; statistics are computed in double.
struct TraceBatch {
    int samples_per_trace = 0;
    GridCell cell{};
    Block key{};
    std::vector<Block> plaintexts; // one per trace
    std::vector<float> samples;    // size() == plaintexts.size() * samples_per_trace

    std::size_t size() const { return plaintexts.size(); }

    std::span<const float> trace(std::size_t t) const {
        return {samples.data() + t * static_cast<std::size_t>(samples_per_trace),
                static_cast<std::size_t>(samples_per_trace)};
    }

    float sample(std::size_t t, int s) const {
        return samples[t * static_cast<std::size_t>(samples_per_trace) +
                       static_cast<std::size_t>(s)];
    }
};

} // namespace emscan
