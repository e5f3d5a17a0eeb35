// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gaitevt/config.hpp"
#include "gaitevt/trial.hpp"

#include <array>
#include <vector>

namespace gaitevt::detail {

using Series3 = std::array<std::vector<double>, 3>;

// Gap-repaired marker data shared by context estimation and the detectors.
// Index 0 = left, 1 = right.
struct Prepared {
    double fs = 0;
    std::size_t n = 0;
    std::array<Series3, 2> heel_raw, toe_raw;
    Series3 pelvis_raw;
    std::array<Series3, 2> heel, toe; // lowpassed
    Series3 pelvis;
    // Gaps longer than the fill limit (and leading/trailing gaps), per side.
    std::array<std::vector<FrameSpan>, 2> invalid;
};

Prepared prepare(const Trial& trial, const DetectorConfig& cfg);

Series3 lowpass(const Series3& s, double fs, const DetectorConfig& cfg);

} // namespace gaitevt::detail
