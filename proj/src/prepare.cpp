// SPDX-License-Identifier: Apache-2.0
#include "prepare.hpp"

#include "gaitevt/error.hpp"
#include "gaitevt/signal.hpp"

#include <algorithm>

namespace gaitevt::detail {

namespace {

// Fills short gaps, then bridges whatever is left so the kernels see finite data.
// Bridged spans are reported so that events near them can be discarded.
Series3 repair(const MarkerTrajectory& m, int max_gap, std::vector<FrameSpan>& invalid) {
    auto r = fill_gaps(m, std::size_t(max_gap));
    const auto& s = r.trajectory.samples;
    const std::size_t n = s.size();
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!is_gap(s[i])) {
            first = std::min(first, i);
            last = i;
        }
    if (first == n)
        throw DetectionError("marker " + m.name + " has no samples");
    Series3 out;
    for (auto& c : out)
        c.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k)
            out[k][i] = s[i][k];
    for (const auto& g : r.unfilled) {
        invalid.push_back(g);
        for (std::size_t i = g.first; i <= g.last; ++i)
            for (int k = 0; k < 3; ++k) {
                if (i < first)
                    out[k][i] = s[first][k];
                else if (i > last)
                    out[k][i] = s[last][k];
                else {
                    const Vec3& a = s[g.first - 1];
                    const Vec3& b = s[g.last + 1];
                    double f = double(i - g.first + 1) / double(g.last - g.first + 2);
                    out[k][i] = a[k] + (b[k] - a[k]) * f;
                }
            }
    }
    return out;
}

} // namespace

Series3 lowpass(const Series3& s, double fs, const DetectorConfig& cfg) {
    // The straight-line part of a walking trajectory would start the filter off its
    // steady state and ring at both ends; it passes a lowpass unchanged, so filter
    // only the residual.
    Series3 out;
    for (int k = 0; k < 3; ++k) {
        const auto residual = detrend(s[k]);
        out[k] = butterworth_zero_phase(residual, fs, cfg.smoothing_cutoff, FilterKind::lowpass, cfg.filter_order);
        for (std::size_t i = 0; i < out[k].size(); ++i)
            out[k][i] += s[k][i] - residual[i];
    }
    return out;
}

Prepared prepare(const Trial& trial, const DetectorConfig& cfg) {
    for (const auto& name : required_markers())
        trial.marker(name);
    Prepared p;
    p.fs = trial.sample_rate;
    p.n = trial.frame_count();
    std::vector<FrameSpan> pelvis_invalid;
    p.pelvis_raw = repair(pelvis_centroid(trial), cfg.max_gap_frames, pelvis_invalid);
    const char* heels[2] = {"LFCC", "RFCC"};
    const char* toes[2] = {"LFMT2", "RFMT2"};
    for (int s = 0; s < 2; ++s) {
        p.invalid[s] = pelvis_invalid;
        p.heel_raw[s] = repair(trial.marker(heels[s]), cfg.max_gap_frames, p.invalid[s]);
        p.toe_raw[s] = repair(trial.marker(toes[s]), cfg.max_gap_frames, p.invalid[s]);
        p.heel[s] = lowpass(p.heel_raw[s], p.fs, cfg);
        p.toe[s] = lowpass(p.toe_raw[s], p.fs, cfg);
    }
    p.pelvis = lowpass(p.pelvis_raw, p.fs, cfg);
    return p;
}

} // namespace gaitevt::detail
