// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/ground_truth.hpp"

#include "gaitevt/error.hpp"
#include "gaitevt/signal.hpp"

#include <cmath>

namespace gaitevt {

DetectionResult events_from_grf(const Trial& trial, const DetectorConfig& cfg) {
    validate(cfg);
    if (!trial.grf_left && !trial.grf_right)
        throw DetectionError("ground truth unavailable");
    DetectionResult r;
    r.method = "grf_truth";
    const std::size_t db = debounce_frames(cfg.debounce, trial.sample_rate);
    auto side = [&](const std::optional<std::vector<double>>& grf, Side s) {
        if (!grf) {
            r.notes.push_back(std::string(side_code(s)) + ": no force channel");
            return;
        }
        std::vector<double> f = *grf;
        for (double& v : f)
            if (std::isnan(v))
                v = 0; // empty cell = no load
        if (cfg.grf_lowpass)
            f = butterworth_zero_phase(f, trial.sample_rate, cfg.grf_lowpass_cutoff, FilterKind::lowpass,
                                       cfg.filter_order);
        for (auto fr : threshold_crossings(f, cfg.grf_threshold, Direction::rising, db))
            r.events.push_back({s, EventKind::hs, long(fr), double(fr) / trial.sample_rate, r.method});
        for (auto fr : threshold_crossings(f, cfg.grf_threshold, Direction::falling, db))
            r.events.push_back({s, EventKind::to, long(fr), double(fr) / trial.sample_rate, r.method});
    };
    side(trial.grf_left, Side::left);
    side(trial.grf_right, Side::right);
    r.diagnostics.assign(r.events.size(), {});
    sort_events(r);
    return r;
}

} // namespace gaitevt
