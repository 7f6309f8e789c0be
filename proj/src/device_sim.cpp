/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#include "emscan/device_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emscan {

namespace {

double bump_sum(const std::vector<LeakageBump> &bumps, double x, double y) {
    double v = 0.0;
    for (const auto &b : bumps) {
        const double dx = x - b.center_x;
        const double dy = y - b.center_y;
        v += b.peak_snr *
             std::exp(-(dx * dx + dy * dy) / (2.0 * b.radius_cells * b.radius_cells));
    }
    return v;
}

} // namespace

void SimDeviceConfig::validate() const {
    if (geometry.grid_resolution < 1)
        throw std::invalid_argument("grid_resolution must be >= 1");
    if (geometry.side_length_mm <= 0.0)
        throw std::invalid_argument("side_length_mm must be positive");
    if (samples_per_trace < 1)
        throw std::invalid_argument("samples_per_trace must be >= 1");
    if (leaky_sample_index < 0 || leaky_sample_index >= samples_per_trace)
        throw std::invalid_argument("leaky_sample_index out of range");
    if (leaky_sample_index + 16 > samples_per_trace)
        throw std::invalid_argument(
            "samples_per_trace too small: need 16 leaky slots from leaky_sample_index");
    if (signal_gain <= 0.0)
        throw std::invalid_argument("signal_gain must be positive");
    if (noise_sigma <= 0.0)
        throw std::invalid_argument("noise_sigma must be positive");
    if (field.floor_snr <= 0.0)
        throw std::invalid_argument("floor_snr must be positive");
    if (field.snr_scale <= 0.0)
        throw std::invalid_argument("snr_scale must be positive");
    if (field.roughness_sigma < 0.0)
        throw std::invalid_argument("roughness_sigma must be nonnegative");
    for (const auto &b : field.bumps)
        if (b.radius_cells <= 0.0 || b.peak_snr <= 0.0)
            throw std::invalid_argument("bump radius and peak must be positive");
    for (const auto &b : field.amplitude_bumps)
        if (b.radius_cells <= 0.0)
            throw std::invalid_argument("amplitude bump radius must be positive");
    if (field.amplitude_floor < 0.0)
        throw std::invalid_argument("amplitude_floor must be nonnegative");
}

SimDevice::SimDevice(SimDeviceConfig config) : cfg(std::move(config)) {
    cfg.validate();
    const int n = cfg.geometry.grid_resolution;
    snr_grid.resize(static_cast<std::size_t>(n) * n);
    amp_grid.resize(static_cast<std::size_t>(n) * n);

    // Roughness stream is split off the device seed and realized once;
    // cells are visited in a fixed row-major order.
    Rng rough = Rng(cfg.seed).split(0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = i + 0.5;
            const double y = j + 0.5;
            double v = std::max(cfg.field.floor_snr, bump_sum(cfg.field.bumps, x, y));
            if (cfg.field.roughness_sigma > 0.0)
                v *= std::exp(rough.next_normal(0.0, cfg.field.roughness_sigma));
            snr_grid[static_cast<std::size_t>(i) * n + j] = cfg.field.snr_scale * v;
            amp_grid[static_cast<std::size_t>(i) * n + j] =
                cfg.field.amplitude_floor + bump_sum(cfg.field.amplitude_bumps, x, y);
        }
    }
}

void SimDevice::check_cell(GridCell cell) const {
    const int n = cfg.geometry.grid_resolution;
    if (cell.i < 0 || cell.i >= n || cell.j < 0 || cell.j >= n)
        throw std::invalid_argument("cell (" + std::to_string(cell.i) + "," +
                                    std::to_string(cell.j) + ") outside " +
                                    std::to_string(n) + "x" + std::to_string(n) +
                                    " grid");
}

double SimDevice::true_snr_at(GridCell cell) const {
    check_cell(cell);
    return snr_grid[static_cast<std::size_t>(cell.i) * cfg.geometry.grid_resolution +
                    cell.j];
}

double SimDevice::amplitude_offset_at(GridCell cell) const {
    check_cell(cell);
    return amp_grid[static_cast<std::size_t>(cell.i) * cfg.geometry.grid_resolution +
                    cell.j];
}

double SimDevice::max_true_snr() const {
    double best = 0.0;
    for (const double v : snr_grid)
        best = std::max(best, v);
    return best;
}

GridCell SimDevice::argmax_true_snr() const {
    const int n = cfg.geometry.grid_resolution;
    GridCell best{0, 0};
    double bv = -1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = snr_grid[static_cast<std::size_t>(i) * n + j];
            if (v > bv) {
                bv = v;
                best = {i, j};
            }
        }
    return best;
}

double SimDevice::effective_signal_amplitude(GridCell cell) const {
    return std::sqrt(true_snr_at(cell) * cfg.noise_sigma * cfg.noise_sigma / 2.0);
}

void SimDevice::capture_trace(GridCell cell, const Block &plaintext, const Block &key,
                              Rng &noise, std::span<float> out) const {
    check_cell(cell);
    if (out.size() != static_cast<std::size_t>(cfg.samples_per_trace))
        throw std::invalid_argument("output span size mismatch");

    const double amp = effective_signal_amplitude(cell);
    const double dc = amplitude_offset_at(cell);
    for (int s = 0; s < cfg.samples_per_trace; ++s)
        out[static_cast<std::size_t>(s)] =
            static_cast<float>(dc + noise.next_normal(0.0, cfg.noise_sigma));
    for (int b = 0; b < 16; ++b) {
        const int s = cfg.leaky_sample_index + b;
        out[static_cast<std::size_t>(s)] += static_cast<float>(
            amp * hw_model(plaintext[static_cast<std::size_t>(b)],
                           key[static_cast<std::size_t>(b)]));
    }
}

TraceBatch SimDevice::capture_batch(GridCell cell, const InputSet &inputs,
                                    std::size_t count, Rng &noise) const {
    check_cell(cell);
    if (count == 0)
        throw std::invalid_argument("capture_batch: count must be positive");
    if (inputs.size() < count)
        throw std::invalid_argument("capture_batch: input set smaller than count");

    TraceBatch batch;
    batch.samples_per_trace = cfg.samples_per_trace;
    batch.cell = cell;
    batch.key = inputs.key;
    batch.plaintexts.assign(inputs.plaintexts.begin(), inputs.plaintexts.begin() + count);
    batch.samples.resize(count * static_cast<std::size_t>(cfg.samples_per_trace));
    for (std::size_t t = 0; t < count; ++t) {
        std::span<float> row{batch.samples.data() +
                                 t * static_cast<std::size_t>(cfg.samples_per_trace),
                             static_cast<std::size_t>(cfg.samples_per_trace)};
        capture_trace(cell, batch.plaintexts[t], inputs.key, noise, row);
    }
    return batch;
}

SimDeviceConfig scale_to_grid(const SimDeviceConfig &cfg, int new_resolution) {
    if (new_resolution < 1)
        throw std::invalid_argument("grid resolution must be >= 1");
    SimDeviceConfig out = cfg;
    const double f =
        static_cast<double>(new_resolution) / cfg.geometry.grid_resolution;
    out.geometry.grid_resolution = new_resolution;
    auto scale = [f](std::vector<LeakageBump> &bumps) {
        for (auto &b : bumps) {
            b.center_x *= f;
            b.center_y *= f;
            b.radius_cells *= f;
        }
    };
    scale(out.field.bumps);
    scale(out.field.amplitude_bumps);
    return out;
}

} // namespace emscan
