/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#include "emscan/rng.hpp"

#include <cmath>
#include <numbers>

namespace emscan {

double Rng::next_normal() {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    // Box-Muller on two fresh uniforms; u1 is kept away from 0.
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(theta);
    have_spare = true;
    return r * std::cos(theta);
}

} // namespace emscan
