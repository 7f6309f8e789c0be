/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include "emscan/trace.hpp"

#include <span>
#include <string>

namespace emscan {

enum class LeakageKind { Amplitude, Tvla, Snr };

std::string to_string(LeakageKind kind);
LeakageKind leakage_kind_from_string(const std::string &name);

/// One leakage scalar for one cell.
struct LeakageScalar {
    LeakageKind kind = LeakageKind::Amplitude;
    double value = 0.0;
    long traces_used = 0;
    bool leak_detected = false; // TVLA only: max |t| above the 4.5 threshold
    bool saturated = false;     // SNR only: noise variance vanished, value capped
};

/// |t| threshold for leakage detection at 99.999% per-sample confidence.
inline constexpr double kTvlaThreshold = 4.5;

/// Reported in place of infinity when the SNR denominator vanishes.
inline constexpr double kSnrSaturationCap = 1e9;

/// Mean over traces of the per-trace mean squared sample.
LeakageScalar amplitude(const TraceBatch &traces);

/// Welch's t = (mean_a - mean_b) / sqrt(s_a^2/n_a + s_b^2/n_b) with unbiased
/// sample variances. Throws UndefinedStatistic when both variances are zero.
double welch_t(std::span<const double> group_a, std::span<const double> group_b);

/// Welch's t at one sample index of two trace groups.
double welch_t(int sample_index, const TraceBatch &group_a, const TraceBatch &group_b);

/// Non-specific fixed-vs-random test: max over sample indices of |welch_t|.
/// Samples where the statistic is undefined are skipped; only if every
/// sample is undefined does the error propagate.
LeakageScalar tvla(const TraceBatch &fixed_traces, const TraceBatch &random_traces);

/// Hamming-weight-class SNR: traces are partitioned by HW(S(pt_b XOR k_b));
/// per sample, signal variance is the class-size-weighted variance of class
/// means and noise variance is the pooled within-class variance
/// (SS_within / (n - #classes)); the reported value is the max over samples.
LeakageScalar snr(const TraceBatch &traces, const Block &key, int byte_index);

} // namespace emscan
