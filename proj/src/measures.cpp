/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#include "emscan/measures.hpp"

#include "emscan/errors.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace emscan {

std::string to_string(LeakageKind kind) {
    switch (kind) {
    case LeakageKind::Amplitude:
        return "amplitude";
    case LeakageKind::Tvla:
        return "tvla";
    case LeakageKind::Snr:
        return "snr";
    }
    return "?";
}

LeakageKind leakage_kind_from_string(const std::string &name) {
    if (name == "amplitude")
        return LeakageKind::Amplitude;
    if (name == "tvla")
        return LeakageKind::Tvla;
    if (name == "snr")
        return LeakageKind::Snr;
    throw std::invalid_argument("unknown leakage measure '" + name + "'");
}

LeakageScalar amplitude(const TraceBatch &traces) {
    if (traces.size() == 0)
        throw std::invalid_argument("amplitude: empty trace list");
    double acc = 0.0;
    for (std::size_t t = 0; t < traces.size(); ++t) {
        double ms = 0.0;
        for (const float v : traces.trace(t))
            ms += static_cast<double>(v) * v;
        acc += ms / traces.samples_per_trace;
    }
    return {LeakageKind::Amplitude, acc / static_cast<double>(traces.size()),
            static_cast<long>(traces.size())};
}

namespace {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0; // unbiased
};

MeanVar mean_var(std::span<const double> xs) {
    const auto n = static_cast<double>(xs.size());
    double m = 0.0;
    for (const double x : xs)
        m += x;
    m /= n;
    double ss = 0.0;
    for (const double x : xs)
        ss += (x - m) * (x - m);
    return {m, ss / (n - 1.0)};
}

} // namespace

double welch_t(std::span<const double> group_a, std::span<const double> group_b) {
    if (group_a.size() < 2 || group_b.size() < 2)
        throw std::invalid_argument("welch_t: both groups need >= 2 values");
    const auto [ma, va] = mean_var(group_a);
    const auto [mb, vb] = mean_var(group_b);
    const double denom2 = va / static_cast<double>(group_a.size()) +
                          vb / static_cast<double>(group_b.size());
    if (denom2 <= 0.0)
        throw UndefinedStatistic("welch_t: both sample variances are zero");
    return (ma - mb) / std::sqrt(denom2);
}

double welch_t(int sample_index, const TraceBatch &a, const TraceBatch &b) {
    std::vector<double> xa(a.size()), xb(b.size());
    for (std::size_t t = 0; t < a.size(); ++t)
        xa[t] = a.sample(t, sample_index);
    for (std::size_t t = 0; t < b.size(); ++t)
        xb[t] = b.sample(t, sample_index);
    return welch_t(xa, xb);
}

LeakageScalar tvla(const TraceBatch &fixed_traces, const TraceBatch &random_traces) {
    if (fixed_traces.size() < 2 || random_traces.size() < 2)
        throw std::invalid_argument("tvla: both groups need >= 2 traces");
    if (fixed_traces.samples_per_trace != random_traces.samples_per_trace)
        throw std::invalid_argument("tvla: sample counts differ between groups");

    double best = -1.0;
    for (int s = 0; s < fixed_traces.samples_per_trace; ++s) {
        try {
            best = std::max(best, std::abs(welch_t(s, fixed_traces, random_traces)));
        } catch (const UndefinedStatistic &) {
            // constant sample in both groups; skip
        }
    }
    if (best < 0.0)
        throw UndefinedStatistic("tvla: t undefined at every sample");

    LeakageScalar out{LeakageKind::Tvla, best,
                      static_cast<long>(fixed_traces.size() + random_traces.size())};
    out.leak_detected = best > kTvlaThreshold;
    return out;
}

LeakageScalar snr(const TraceBatch &traces, const Block &key, int byte_index) {
    if (byte_index < 0 || byte_index >= 16)
        throw std::invalid_argument("snr: byte_index must be in [0,16)");
    if (traces.size() < 2)
        throw std::invalid_argument("snr: need >= 2 traces");

    const std::size_t n = traces.size();
    std::vector<int> cls(n);
    std::array<long, 9> counts{};
    for (std::size_t t = 0; t < n; ++t) {
        cls[t] = hw_model(traces.plaintexts[t][static_cast<std::size_t>(byte_index)],
                          key[static_cast<std::size_t>(byte_index)]);
        ++counts[static_cast<std::size_t>(cls[t])];
    }
    int nonempty = 0;
    for (const long c : counts)
        nonempty += c > 0;
    if (nonempty < 2)
        throw InsufficientClasses("snr: traces fall into fewer than 2 HW classes");

    LeakageScalar out{LeakageKind::Snr, 0.0, static_cast<long>(n)};
    for (int s = 0; s < traces.samples_per_trace; ++s) {
        std::array<double, 9> sums{};
        double grand = 0.0;
        double ss_total = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double x = traces.sample(t, s);
            sums[static_cast<std::size_t>(cls[t])] += x;
            grand += x;
            ss_total += x * x;
        }
        grand /= static_cast<double>(n);

        double signal = 0.0;
        double ss_between = 0.0;
        for (int c = 0; c < 9; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0)
                continue;
            const double nc = static_cast<double>(counts[static_cast<std::size_t>(c)]);
            const double mc = sums[static_cast<std::size_t>(c)] / nc;
            signal += nc * (mc - grand) * (mc - grand);
            ss_between += nc * mc * mc;
        }
        signal /= static_cast<double>(n);
        const double ss_within = ss_total - ss_between;
        const double noise = ss_within / static_cast<double>(n - nonempty);

        if (noise <= signal * 1e-12 || noise <= 0.0) {
            out.value = kSnrSaturationCap;
            out.saturated = true;
            return out;
        }
        out.value = std::max(out.value, signal / noise);
    }
    return out;
}

} // namespace emscan
