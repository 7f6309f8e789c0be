/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include "emscan/device_sim.hpp"
#include "emscan/trace.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>

namespace emscan {

struct BackendCapabilities {
    int grid_resolution = 0;
    double chip_origin_x_mm = 0.0;
    double chip_origin_y_mm = 0.0;
    double cell_pitch_mm = 0.0;
};

/// Result of a probe move. The command carries exact 2-decimal millimetre
/// coordinates; `stepper_x/y_mm` report the position quantized to the
/// printer's 0.1 mm step grid, with `quantized` set when they differ from
/// the requested coordinates.
struct MoveAck {
    GridCell cell{};
    double x_mm = 0.0;
    double y_mm = 0.0;
    double stepper_x_mm = 0.0;
    double stepper_y_mm = 0.0;
    bool quantized = false;
};

/// Backend contract separating the pipeline from hardware: home, move the
/// probe to a grid cell, capture a batch at the current cell. One driver
/// owns a backend at a time; motion and capture are never concurrent.
class ScanBackend {
  public:
    virtual ~ScanBackend() = default;

    virtual BackendCapabilities capabilities() const = 0;
    virtual void home() = 0;
    virtual MoveAck move_to(GridCell cell) = 0;

    /// Exactly `count` traces at the current cell. Throws ProtocolViolation
    /// if no move_to() has succeeded since construction (homing does not
    /// establish a capture position).
    virtual TraceBatch capture_batch(std::size_t count, const InputSet &inputs) = 0;
};

/// Simulator-backed instrument.
class SimBackend final : public ScanBackend {
  public:
    /// `capture_seed` seeds the backend's noise stream (split per batch).
    SimBackend(std::shared_ptr<const SimDevice> device, std::uint64_t capture_seed);

    BackendCapabilities capabilities() const override;
    void home() override;
    MoveAck move_to(GridCell cell) override;
    TraceBatch capture_batch(std::size_t count, const InputSet &inputs) override;

    const SimDevice &device() const { return *dev; }

  private:
    std::shared_ptr<const SimDevice> dev;
    std::uint64_t seed;
    std::uint64_t batch_counter = 0;
    std::optional<GridCell> position;
};

/// Formats and emits the probe-motion G-code dialect: G21/G90/G28 preamble,
/// absolute G1 X.. Y.. F.. moves at fixed 2-decimal mm, M400 after each
/// move, LF line endings, flush after every M400. Z is never touched
/// (probe height is set out of band).
class GcodeWriter {
  public:
    GcodeWriter(std::ostream &sink, double feed_mm_per_min = kDefaultFeed);

    void preamble(); // G21, G90, G28
    /// Emits G1+M400 for an absolute XY move; returns the stepper-grid
    /// quantization of the requested coordinates.
    std::pair<double, double> linear_move(double x_mm, double y_mm);

    static constexpr double kDefaultFeed = 3000.0;
    /// 180 mm/s printer limit.
    static constexpr double kMaxFeed = 10800.0;
    /// Minimum stepper step.
    static constexpr double kStepMm = 0.1;

  private:
    std::ostream &out;
    double feed;
};

/// Decorates a trace-producing backend with G-code emission: every motion
/// is mirrored to the sink, captures pass through to the inner backend. A
/// replayed call sequence yields a byte-identical transcript.
class GcodeBackend final : public ScanBackend {
  public:
    GcodeBackend(ScanBackend &inner, std::ostream &sink,
                 double feed_mm_per_min = GcodeWriter::kDefaultFeed);

    BackendCapabilities capabilities() const override;
    void home() override;
    MoveAck move_to(GridCell cell) override;
    TraceBatch capture_batch(std::size_t count, const InputSet &inputs) override;

  private:
    ScanBackend &inner;
    GcodeWriter writer;
};

/// Cell-center coordinates in mm for a given geometry/origin.
std::pair<double, double> cell_center_mm(const BackendCapabilities &caps, GridCell cell);

} // namespace emscan
