/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#include "emscan/search.hpp"

#include "emscan/errors.hpp"
#include "emscan/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace emscan {

// ---------------------------------------------------------------------------
// BackendProbe

BackendProbe::BackendProbe(ScanBackend &backend, LeakageKind kind,
                           std::size_t traces_per_measure, const Block &key,
                           const Block &fixed_pt, std::uint64_t seed, int byte_index)
    : backend(backend), kind(kind), traces_per_measure(traces_per_measure), key(key),
      fixed_pt(fixed_pt), seed(seed), byte_index(byte_index) {
    if (traces_per_measure < 2)
        throw std::invalid_argument("traces_per_measure must be >= 2");
    if (kind == LeakageKind::Tvla && traces_per_measure < 4)
        throw std::invalid_argument("tvla needs >= 4 traces per measurement");
}

LeakageScalar BackendProbe::measure(GridCell cell) {
    backend.move_to(cell);
    const int n = backend.capabilities().grid_resolution;
    const std::uint64_t input_seed =
        Rng::mix(seed ^ Rng::mix(static_cast<std::uint64_t>(cell.i) * n + cell.j) ^
                 Rng::mix(static_cast<std::uint64_t>(++measure_counter) << 20));

    LeakageScalar out;
    switch (kind) {
    case LeakageKind::Amplitude: {
        const auto inputs = make_random_inputs(input_seed, traces_per_measure, key);
        out = amplitude(backend.capture_batch(traces_per_measure, inputs));
        break;
    }
    case LeakageKind::Tvla: {
        const std::size_t group = traces_per_measure / 2;
        const auto [fixed, random] = generate_tvla_sets(input_seed, group, key, fixed_pt);
        const auto fixed_batch = backend.capture_batch(group, fixed);
        const auto random_batch = backend.capture_batch(group, random);
        out = tvla(fixed_batch, random_batch);
        break;
    }
    case LeakageKind::Snr: {
        const auto inputs = make_random_inputs(input_seed, traces_per_measure, key);
        out = snr(backend.capture_batch(traces_per_measure, inputs), key, byte_index);
        break;
    }
    }
    traces_total += out.traces_used;
    return out;
}

// ---------------------------------------------------------------------------
// Search

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::MaxIterations:
        return "max_iterations";
    case StopReason::NoImprovement:
        return "no_improvement";
    case StopReason::EdgeReached:
        return "edge_reached";
    case StopReason::DegenerateStart:
        return "degenerate_start";
    }
    return "?";
}

const LeakageScalar &SearchState::measure_cell(LeakageProbe &probe, GridCell cell) {
    const auto k = std::make_pair(cell.i, cell.j);
    if (auto it = visited.find(k); it != visited.end()) {
        // Revisit: cached value, counts as a non-improving observation.
        ++no_improve;
        trajectory.push_back({cell, it->second.value, 0, true});
        return it->second;
    }
    const LeakageScalar v = probe.measure(cell);
    ++measurements_made;
    trajectory.push_back({cell, v.value, v.traces_used, false});
    auto [it, inserted] = visited.emplace(k, v);
    if (v.value > best_leakage) {
        best_leakage = v.value;
        best_cell = cell;
        measurements_to_best = measurements_made;
        no_improve = 0;
    } else {
        ++no_improve;
    }
    return it->second;
}

GridCell initial_block_center(int n, int m, int bi, int bj) {
    return {(2 * bi + 1) * n / (2 * m), (2 * bj + 1) * n / (2 * m)};
}

SearchState initial_phase(LeakageProbe &probe, const SearchParams &params) {
    const int n = probe.grid_resolution();
    const int m = params.initial_grid_size;
    if (m < 1 || m > n)
        throw std::invalid_argument("initial_grid_size must be in [1, N]");

    SearchState state;
    for (int bi = 0; bi < m; ++bi)
        for (int bj = 0; bj < m; ++bj)
            state.measure_cell(probe, initial_block_center(n, m, bi, bj));

    state.current_cell = state.best_cell;
    state.pos_x = state.best_cell.i + 0.5;
    state.pos_y = state.best_cell.j + 0.5;
    return state;
}

std::pair<double, double> estimate_gradient(LeakageProbe &probe, SearchState &state) {
    const int n = probe.grid_resolution();
    static constexpr int kDir[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}; // E, W, N, S
    double gx = 0.0;
    double gy = 0.0;
    bool any = false;
    for (const auto &d : kDir) {
        const GridCell nb{state.current_cell.i + d[0], state.current_cell.j + d[1]};
        if (nb.i < 0 || nb.i >= n || nb.j < 0 || nb.j >= n)
            continue; // clamped at the edge: missing neighbor contributes nothing
        any = true;
        const double L = state.measure_cell(probe, nb).value;
        gx += L * d[0] / 4.0;
        gy += L * d[1] / 4.0;
    }
    if (!any)
        throw DegenerateGrid("estimate_gradient: no in-grid neighbor (N == 1)");
    return {gx, gy};
}

void step(LeakageProbe &probe, SearchState &state, std::pair<double, double> g,
          const SearchParams &params) {
    const int n = probe.grid_resolution();
    const double norm = std::hypot(g.first, g.second);
    if (norm == 0.0) {
        // No direction: a non-improving iteration without motion.
        ++state.no_improve;
        return;
    }
    double x = state.pos_x + params.step_size_cells * g.first / norm;
    double y = state.pos_y + params.step_size_cells * g.second / norm;
    const bool clamped = x < 0.0 || x > n || y < 0.0 || y > n;
    x = std::min(std::max(x, 0.0), static_cast<double>(n));
    y = std::min(std::max(y, 0.0), static_cast<double>(n));
    state.pos_x = x;
    state.pos_y = y;
    state.current_cell = {std::min(static_cast<int>(x), n - 1),
                          std::min(static_cast<int>(y), n - 1)};
    if (clamped)
        state.edge_stopped = true;
    state.measure_cell(probe, state.current_cell);
}

SearchReport run_search(LeakageProbe &probe, const SearchParams &params) {
    const int n = probe.grid_resolution();
    const int limit = params.no_improve_limit > 0
                          ? params.no_improve_limit
                          : (n + 2) / 3; // default: ceil(N/3)

    SearchState state = initial_phase(probe, params);
    StopReason reason = StopReason::MaxIterations;

    if (n == 1) {
        reason = StopReason::DegenerateStart;
    } else {
        for (int it = 0; it < params.max_iterations; ++it) {
            if (state.no_improve >= limit) {
                reason = StopReason::NoImprovement;
                break;
            }
            const auto g = estimate_gradient(probe, state);
            if (state.no_improve >= limit) {
                reason = StopReason::NoImprovement;
                break;
            }
            step(probe, state, g, params);
            if (state.edge_stopped) {
                reason = StopReason::EdgeReached;
                break;
            }
            if (state.no_improve >= limit) {
                reason = StopReason::NoImprovement;
                break;
            }
        }
    }

    SearchReport report;
    report.params = params;
    report.params.no_improve_limit = limit;
    report.grid_resolution = n;
    report.best_cell = state.best_cell;
    report.best_leakage = state.best_leakage;
    report.measurements_made = state.measurements_made;
    report.measurements_to_best = state.measurements_to_best;
    report.stop_reason = reason;
    report.trajectory = std::move(state.trajectory);
    long traces = 0;
    for (const auto &p : report.trajectory)
        traces += p.traces_used;
    report.total_traces = traces;
    return report;
}

} // namespace emscan
