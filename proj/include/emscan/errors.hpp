/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace emscan {

/// A statistic whose defining ratio is 0/0 (e.g. Welch's t with two
/// zero-variance groups, Pearson with a constant input).
struct UndefinedStatistic : std::domain_error {
    using std::domain_error::domain_error;
};

/// SNR estimation needs traces in at least two Hamming-weight classes.
struct InsufficientClasses : std::domain_error {
    using std::domain_error::domain_error;
};

/// Backend call sequence violated the move-then-capture contract.
struct ProtocolViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Gradient estimation impossible (no in-grid neighbors).
struct DegenerateGrid : std::domain_error {
    using std::domain_error::domain_error;
};

/// Constant fitting rejected the input data (too few points or span).
struct IllConditionedFit : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace emscan
