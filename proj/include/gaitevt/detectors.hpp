// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gaitevt/config.hpp"
#include "gaitevt/events.hpp"
#include "gaitevt/signal.hpp"
#include "gaitevt/trial.hpp"

#include <string>
#include <vector>

namespace gaitevt {

// All detectors expect a normalized trial (+X progression, +Z up).
DetectionResult detect_zeni(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);
DetectionResult detect_desailly(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);
DetectionResult detect_oconnor(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);
DetectionResult detect_ghoussayni(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);
DetectionResult detect_hreljac(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);
DetectionResult detect_hsue(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);
DetectionResult detect_bonci(const Trial& trial, const GaitContext& ctx, const DetectorConfig& cfg);

const std::vector<std::string>& method_names();

// Case-insensitive. Unknown names raise ConfigError listing the valid ones.
std::string canonical_method(const std::string& method);
DetectionResult detect(const std::string& method, const Trial& trial, const GaitContext& ctx,
                       const DetectorConfig& cfg);

// Normalize, estimate context, detect.
DetectionResult run_detection(const std::string& method, const Trial& raw, const DetectorConfig& cfg);

} // namespace gaitevt
