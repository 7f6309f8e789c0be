/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include "emscan/crypto.hpp"
#include "emscan/rng.hpp"
#include "emscan/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emscan {

/// Scan-area geometry: a square chip of side_length_mm scanned as an
/// N x N cell grid.
struct ChipGeometry {
    double side_length_mm = 9.0;
    int grid_resolution = 30;

    double cell_pitch_mm() const { return side_length_mm / grid_resolution; }
};

/// One Gaussian leakage bump, positions and radius in cell units.
struct LeakageBump {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius_cells = 1.0;
    double peak_snr = 1.0;
};

/// Spatial ground-truth model of the chip. The SNR surface is a sum of
/// bumps clamped below by floor_snr, perturbed per cell by frozen
/// multiplicative log-normal roughness, and globally scaled by snr_scale
/// (masking is modeled as snr_scale < 1). The amplitude surface is an
/// independent per-cell DC offset added to every sample; it shifts the
/// mean-square amplitude of traces without touching t-values, SNR or
/// correlation, which all cancel constant offsets.
struct LeakageField {
    std::vector<LeakageBump> bumps;
    double floor_snr = 0.01;
    double roughness_sigma = 0.0;
    double snr_scale = 1.0;

    std::vector<LeakageBump> amplitude_bumps; // peak_snr reused as peak offset
    double amplitude_floor = 0.0;
};

struct SimDeviceConfig {
    std::string name = "sim";
    ChipGeometry geometry;
    LeakageField field;
    int samples_per_trace = 24;
    int leaky_sample_index = 4; // byte b leaks at leaky_sample_index + b
    double signal_gain = 1.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 1;

    void validate() const; // throws std::invalid_argument on bad fields
};

/// Synthetic device under test. The roughness realization is drawn once
/// from the config seed and then frozen, so the ground-truth surface is
/// identical across every scan of the same configured device.
class SimDevice {
  public:
    explicit SimDevice(SimDeviceConfig config);

    const SimDeviceConfig &config() const { return cfg; }
    int grid_resolution() const { return cfg.geometry.grid_resolution; }

    /// Ground-truth SNR (variance of the data-dependent signal over noise
    /// variance) at a cell. Throws std::invalid_argument out of grid.
    double true_snr_at(GridCell cell) const;

    /// Ground-truth DC amplitude offset at a cell.
    double amplitude_offset_at(GridCell cell) const;

    double max_true_snr() const;
    GridCell argmax_true_snr() const;

    /// Per-HW-unit signal amplitude at a cell:
    /// signal_gain * alpha = sqrt(true_snr * noise_sigma^2 / 2), the closed
    /// form that makes VAR[class means]/VAR[noise] equal true_snr (HW of a
    /// first-round S-box output has variance 2 over uniform plaintexts).
    double effective_signal_amplitude(GridCell cell) const;

    /// One trace for one plaintext; noise drawn from the caller's stream.
    /// Sample leaky_sample_index + b carries byte b's Hamming-weight leak,
    /// all other samples carry noise only, all samples get the cell's DC
    /// amplitude offset.
    void capture_trace(GridCell cell, const Block &plaintext, const Block &key,
                       Rng &noise, std::span<float> out) const;

    TraceBatch capture_batch(GridCell cell, const InputSet &inputs,
                             std::size_t count, Rng &noise) const;

  private:
    void check_cell(GridCell cell) const;

    SimDeviceConfig cfg;
    std::vector<double> snr_grid; // frozen ground truth, row-major [i][j]
    std::vector<double> amp_grid;
};

/// Rescales a config's field (bump centers and radii, in cell units) to a
/// new grid resolution so the same normalized surface can be scanned at
/// N = 10/30/60.
SimDeviceConfig scale_to_grid(const SimDeviceConfig &cfg, int new_resolution);

} // namespace emscan
