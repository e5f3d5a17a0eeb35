// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gaitevt/synth.hpp"
#include "gaitevt/trial.hpp"

#include <string>

namespace gaitevt::testing {

inline SyntheticTrial synth(double period = 1.1, double speed = 1.2, double noise = 0.0, std::uint64_t seed = 0) {
    SyntheticSpec s;
    s.gait_period = period;
    s.walking_speed = speed;
    s.noise_std = noise;
    s.seed = seed;
    return generate(s, "t");
}

// Two frames, every required marker, values in millimetres.
inline std::string two_frame_csv(const std::string& units = "mm") {
    std::string head = "# sample_rate_hz=200, units=" + units + "\nframe";
    std::string r0 = "0", r1 = "1";
    int k = 0;
    for (const auto& m : required_markers()) {
        head += ", " + m + "_x, " + m + "_y, " + m + "_z";
        for (int a = 0; a < 3; ++a, ++k) {
            r0 += ", " + std::to_string(1000 + k);
            r1 += ", " + std::to_string(2000 + k);
        }
    }
    return head + "\n" + r0 + "\n" + r1 + "\n";
}

} // namespace gaitevt::testing
