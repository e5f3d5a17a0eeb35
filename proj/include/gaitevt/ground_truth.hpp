// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gaitevt/config.hpp"
#include "gaitevt/events.hpp"
#include "gaitevt/trial.hpp"

namespace gaitevt {

// HS at rising and TO at falling debounced crossings of cfg.grf_threshold.
// Throws DetectionError("ground truth unavailable") without GRF channels.
DetectionResult events_from_grf(const Trial& trial, const DetectorConfig& cfg = {});

} // namespace gaitevt
