// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gaitevt {

struct DetectorConfig {
    double ghoussayni_speed_threshold = 0.5; // m/s
    double grf_threshold = 20.0;             // N
    double desailly_hs_cutoff_mult = 0.5;    // x gait frequency
    double desailly_to_cutoff_mult = 1.1;
    double bonci_rearfoot_mult = 0.5;        // x walking speed
    double bonci_mult = 0.8;
    double smoothing_cutoff = 7.0;           // Hz
    double min_event_separation_frac = 0.4;  // x gait period
    double debounce = 0.05;                  // s
    std::optional<double> extrema_prominence; // empty = adaptive

    int filter_order = 4;
    int desailly_filter_order = 2;
    int max_gap_frames = 10;
    bool subframe_refinement = false;
    bool grf_lowpass = false;
    double grf_lowpass_cutoff = 20.0;

    bool operator==(const DetectorConfig&) const = default;
};

// Throws ConfigError naming the first offending field.
void validate(const DetectorConfig& cfg);

// Numeric fields addressable by name; booleans take 0/1.
// extrema_prominence <= 0 restores the adaptive default.
void set_field(DetectorConfig& cfg, const std::string& key, double value);
double get_field(const DetectorConfig& cfg, const std::string& key);
const std::vector<std::string>& config_field_names();

// Applies the keys present in a JSON object on top of cfg. Unknown keys are rejected.
void apply_json(DetectorConfig& cfg, const std::string& json_text);
DetectorConfig load_config(const std::string& path, const DetectorConfig& base = {});
std::string config_to_json(const DetectorConfig& cfg);

} // namespace gaitevt
