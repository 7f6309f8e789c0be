/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include "emscan/instrument.hpp"
#include "emscan/trace.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace emscan {

/// Sample Pearson correlation coefficient. Throws UndefinedStatistic for a
/// constant input, std::invalid_argument for mismatched/short inputs.
double pearson(std::span<const double> x, std::span<const double> y);

/// Per-hypothesis max-|rho| values at increasing trace-count checkpoints
/// for one key byte.
struct CorrelationTrajectory {
    int byte_index = 0;
    std::vector<long> checkpoints;
    std::vector<std::array<double, 256>> max_abs_rho; // one array per checkpoint

    /// Hypothesis ranked first at a checkpoint (lowest value wins ties).
    int top_hypothesis(std::size_t checkpoint_index) const;
};

std::vector<long> make_checkpoints(long total_traces, long stride);

/// Correlation attack on one key byte: for every hypothesis k the model
/// vector HW(S(pt_b XOR k)) is correlated against every sample column over
/// the first T traces, for each checkpoint T. Computed from running
/// per-plaintext-value aggregates, one pass over the traces. Undefined
/// correlations contribute 0.
CorrelationTrajectory cema(const TraceBatch &traces, int byte_index,
                           std::vector<long> checkpoints);

/// Minimum traces to disclosure: the smallest checkpoint from which the
/// correct hypothesis stays strictly top-ranked through every later
/// checkpoint. nullopt = not disclosed within the trajectory.
std::optional<long> mtd(const CorrelationTrajectory &trajectory,
                        std::uint8_t true_key_byte);

struct AttackResult {
    Block recovered_key{};
    std::array<std::optional<long>, 16> mtd_per_byte;
    std::vector<CorrelationTrajectory> trajectories;
    std::vector<int> attacked_bytes;
    long traces_captured = 0;

    /// Largest disclosed per-byte MTD, or nullopt if any attacked byte is
    /// undisclosed. This is the CEMA trace cost entering total-trace
    /// accounting.
    std::optional<long> worst_mtd() const;
};

/// Captures `cap` random-plaintext traces at the backend's current cell and
/// runs cema + mtd for each requested byte. The device key doubles as the
/// ground truth for MTD evaluation.
AttackResult attack_at_cell(ScanBackend &backend, const Block &key,
                            std::span<const int> byte_indices, long cap, long stride,
                            std::uint64_t seed);

} // namespace emscan
