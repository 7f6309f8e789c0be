/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#include "emscan/instrument.hpp"

#include "emscan/errors.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace emscan {

std::pair<double, double> cell_center_mm(const BackendCapabilities &caps, GridCell cell) {
    return {caps.chip_origin_x_mm + (cell.i + 0.5) * caps.cell_pitch_mm,
            caps.chip_origin_y_mm + (cell.j + 0.5) * caps.cell_pitch_mm};
}

// ---------------------------------------------------------------------------
// SimBackend

SimBackend::SimBackend(std::shared_ptr<const SimDevice> device, std::uint64_t capture_seed)
    : dev(std::move(device)), seed(capture_seed) {}

BackendCapabilities SimBackend::capabilities() const {
    const auto &g = dev->config().geometry;
    return {g.grid_resolution, 0.0, 0.0, g.cell_pitch_mm()};
}

void SimBackend::home() {
    // Homing parks the carriage; it does not establish a capture position.
    position.reset();
}

MoveAck SimBackend::move_to(GridCell cell) {
    const int n = dev->grid_resolution();
    if (cell.i < 0 || cell.i >= n || cell.j < 0 || cell.j >= n)
        throw std::invalid_argument("move_to: cell outside grid, no motion");
    position = cell;
    const auto [x, y] = cell_center_mm(capabilities(), cell);
    MoveAck ack;
    ack.cell = cell;
    ack.x_mm = x;
    ack.y_mm = y;
    ack.stepper_x_mm = x;
    ack.stepper_y_mm = y;
    return ack;
}

TraceBatch SimBackend::capture_batch(std::size_t count, const InputSet &inputs) {
    if (!position)
        throw ProtocolViolation("capture_batch before any successful move_to");
    if (count == 0)
        throw std::invalid_argument("capture_batch: count must be positive");
    // One child stream per batch: replaying the same call sequence replays
    // the same noise.
    Rng noise = Rng(seed).split(++batch_counter);
    return dev->capture_batch(*position, inputs, count, noise);
}

// ---------------------------------------------------------------------------
// GcodeWriter

GcodeWriter::GcodeWriter(std::ostream &sink, double feed_mm_per_min)
    : out(sink), feed(std::min(feed_mm_per_min, kMaxFeed)) {
    if (feed_mm_per_min <= 0.0)
        throw std::invalid_argument("feed rate must be positive");
}

void GcodeWriter::preamble() { out << "G21\nG90\nG28\n"; }

std::pair<double, double> GcodeWriter::linear_move(double x_mm, double y_mm) {
    char line[64];
    std::snprintf(line, sizeof(line), "G1 X%.2f Y%.2f F%d\n", x_mm, y_mm,
                  static_cast<int>(feed));
    out << line << "M400\n";
    out.flush();
    return {std::round(x_mm / kStepMm) * kStepMm, std::round(y_mm / kStepMm) * kStepMm};
}

// ---------------------------------------------------------------------------
// GcodeBackend

GcodeBackend::GcodeBackend(ScanBackend &inner, std::ostream &sink, double feed_mm_per_min)
    : inner(inner), writer(sink, feed_mm_per_min) {}

BackendCapabilities GcodeBackend::capabilities() const { return inner.capabilities(); }

void GcodeBackend::home() {
    writer.preamble();
    inner.home();
}

MoveAck GcodeBackend::move_to(GridCell cell) {
    MoveAck ack = inner.move_to(cell); // validates; refused moves emit nothing
    const auto [sx, sy] = writer.linear_move(ack.x_mm, ack.y_mm);
    ack.stepper_x_mm = sx;
    ack.stepper_y_mm = sy;
    ack.quantized = std::abs(sx - ack.x_mm) > 1e-9 || std::abs(sy - ack.y_mm) > 1e-9;
    return ack;
}

TraceBatch GcodeBackend::capture_batch(std::size_t count, const InputSet &inputs) {
    return inner.capture_batch(count, inputs);
}

} // namespace emscan
