/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include "emscan/instrument.hpp"
#include "emscan/measures.hpp"
#include "emscan/trace.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace emscan {

/// Anything that can produce a leakage scalar for a grid cell. The search
/// is written against this so it can be driven by a real backend or by a
/// synthetic field in tests.
class LeakageProbe {
  public:
    virtual ~LeakageProbe() = default;
    virtual LeakageScalar measure(GridCell cell) = 0;
    virtual int grid_resolution() const = 0;
};

/// Probe backed by an instrument: moves to the cell, captures the batch the
/// measure needs, reduces it to one scalar. Inputs are derived from
/// (seed, cell, measurement counter), so a rerun replays identically.
class BackendProbe final : public LeakageProbe {
  public:
    BackendProbe(ScanBackend &backend, LeakageKind kind, std::size_t traces_per_measure,
                 const Block &key, const Block &fixed_pt, std::uint64_t seed,
                 int byte_index = 0);

    LeakageScalar measure(GridCell cell) override;
    int grid_resolution() const override { return backend.capabilities().grid_resolution; }

    long total_traces() const { return traces_total; }
    long measurements() const { return measure_counter; }

  private:
    ScanBackend &backend;
    LeakageKind kind;
    std::size_t traces_per_measure;
    Block key;
    Block fixed_pt;
    std::uint64_t seed;
    int byte_index;
    long measure_counter = 0;
    long traces_total = 0;
};

struct SearchParams {
    int initial_grid_size = 2;    // M; phase 1 samples M x M block centers
    double step_size_cells = 2.8; // constant step length, in cells
    int max_iterations = 100;
    int no_improve_limit = 0; // consecutive non-improving measurements; 0 = ceil(N/3)
    LeakageKind measure = LeakageKind::Snr;
};

/// Effective step in mm for an N-cell scan of an L-mm chip.
inline double effective_step_mm(double step_size_cells, double side_length_mm, int n) {
    return side_length_mm / n * step_size_cells;
}

enum class StopReason { MaxIterations, NoImprovement, EdgeReached, DegenerateStart };

struct TrajectoryPoint {
    GridCell cell{};
    double leakage = 0.0;
    long traces_used = 0;
    bool cached = false;
};

struct SearchState {
    double pos_x = 0.0; // continuous position, cell units in [0, N]
    double pos_y = 0.0;
    GridCell current_cell{};
    GridCell best_cell{};
    double best_leakage = -1.0;
    long measurements_made = 0;
    long measurements_to_best = 0;
    int no_improve = 0;
    bool edge_stopped = false;
    std::map<std::pair<int, int>, LeakageScalar> visited;
    std::vector<TrajectoryPoint> trajectory;

    /// Measures through the cache; bookkeeping for best/no-improve counters.
    const LeakageScalar &measure_cell(LeakageProbe &probe, GridCell cell);
};

struct SearchReport {
    SearchParams params;
    int grid_resolution = 0;
    GridCell best_cell{};
    double best_leakage = 0.0;
    long measurements_made = 0;
    long measurements_to_best = 0;
    long total_traces = 0;
    StopReason stop_reason = StopReason::MaxIterations;
    std::vector<TrajectoryPoint> trajectory;
};

/// Block center of phase-1 block (bi, bj) for an M x M division of N cells.
GridCell initial_block_center(int n, int m, int bi, int bj);

/// Phase 1: measure the M x M block centers, seed the state at the argmax
/// (first-in-scan-order cell wins ties, i ascending then j).
SearchState initial_phase(LeakageProbe &probe, const SearchParams &params);

/// Four-neighbor vector gradient at the current cell: each in-grid neighbor
/// measurement is a vector of that magnitude toward the neighbor, the
/// estimate is their average. Throws DegenerateGrid if no neighbor exists.
std::pair<double, double> estimate_gradient(LeakageProbe &probe, SearchState &state);

/// One move: constant-length step along the gradient direction, position
/// clamped to [0, N]^2 (clamping raises the edge-stop flag), landing cell
/// measured. A zero gradient counts as a non-improving iteration.
void step(LeakageProbe &probe, SearchState &state, std::pair<double, double> g,
          const SearchParams &params);

/// Whole two-phase search.
SearchReport run_search(LeakageProbe &probe, const SearchParams &params);

std::string to_string(StopReason reason);

} // namespace emscan
