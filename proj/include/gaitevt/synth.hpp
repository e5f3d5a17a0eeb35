// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gaitevt/events.hpp"
#include "gaitevt/trial.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gaitevt {

struct SyntheticSpec {
    int n_cycles = 10;
    double gait_period = 1.1;     // s
    double stance_fraction = 0.62;
    double walking_speed = 1.2;   // m/s
    double step_height = 0.10;    // m
    double sample_rate = 200.0;
    double noise_std = 0.0;       // m
    std::uint64_t seed = 0;
    double phase_offset_lr = 0.5;
};

struct CycleTimes {
    double hs = 0;
    double to = 0;
};

struct TruthSchedule {
    std::vector<CycleTimes> left;
    std::vector<CycleTimes> right;
};

struct SyntheticTrial {
    Trial trial;
    TruthSchedule schedule;
};

inline constexpr double kFootLength = 0.15;

void validate(const SyntheticSpec& spec);
SyntheticTrial generate(const SyntheticSpec& spec, const std::string& id = "synth");

// Schedule events on the frame grid, source "truth".
std::vector<GaitEvent> schedule_events(const TruthSchedule& s, double sample_rate);

} // namespace gaitevt
