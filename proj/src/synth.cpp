// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/synth.hpp"

#include "gaitevt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

namespace gaitevt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLandingHeight = 0.02; // toe height when the heel lands
constexpr double kToeLowering = 0.10;   // fraction of the cycle for the forefoot to settle
constexpr double kMarginCycles = 0.3;   // lead-in / lead-out, in periods
constexpr double kPeakForce = 1.2 * 600.0;
constexpr double kForceRamp = 0.030;

double heel_lift(double u, double h) { return h * std::sin(kPi * u * u); }

double toe_lift(double u, double h) {
    const double ease = u * u * (3 - 2 * u);
    return h * std::sin(kPi * (2 * u - u * u)) + kLandingHeight * ease;
}

double toe_apex_phase(double h) {
    double best_u = 0, best = -1;
    for (int i = 0; i <= 20000; ++i) {
        const double u = i / 20000.0;
        const double z = toe_lift(u, h);
        if (z > best) {
            best = z;
            best_u = u;
        }
    }
    return best_u;
}

} // namespace

void validate(const SyntheticSpec& s) {
    auto fail = [](const std::string& m) { throw ParameterError("synthetic spec: " + m); };
    if (s.n_cycles < 1)
        fail("n_cycles must be >= 1");
    if (!(s.gait_period > 0))
        fail("gait_period must be > 0");
    if (!(s.stance_fraction > 0.4 && s.stance_fraction < 0.8))
        fail("stance_fraction must be in (0.4, 0.8)");
    if (!(s.walking_speed > 0))
        fail("walking_speed must be > 0");
    if (!(s.step_height > 0))
        fail("step_height must be > 0");
    if (!(s.sample_rate > 0))
        fail("sample_rate must be > 0");
    if (!(s.noise_std >= 0))
        fail("noise_std must be >= 0");
    if (!(s.phase_offset_lr > 0 && s.phase_offset_lr < 1))
        fail("phase_offset_lr must be in (0, 1)");
}

SyntheticTrial generate(const SyntheticSpec& spec, const std::string& id) {
    validate(spec);
    const double T = spec.gait_period;
    const double v = spec.walking_speed;
    const double h = spec.step_height;
    const double fs = spec.sample_rate;
    const double stride = v * T;
    const double swing = (1 - spec.stance_fraction) * T;
    const double margin = kMarginCycles * T;
    const int n = spec.n_cycles;

    SyntheticTrial out;
    auto& sched = out.schedule;
    for (int k = 0; k < n; ++k) {
        const double l = margin + k * T;
        const double r = margin + (k + spec.phase_offset_lr) * T;
        sched.left.push_back({l, l + spec.stance_fraction * T});
        sched.right.push_back({r, r + spec.stance_fraction * T});
    }
    const double end = std::max(sched.left.back().to, sched.right.back().to) + margin;
    const std::size_t frames = std::size_t(std::floor(end * fs)) + 1;

    Trial& t = out.trial;
    t.id = id;
    t.sample_rate = fs;

    struct PelvisMarker {
        const char* name;
        double dx, dy;
    };
    const PelvisMarker pelvis[] = {{"LASIS", 0.1, 0.12}, {"LPSIS", -0.1, 0.05}, {"RASIS", 0.1, -0.12},
                                   {"RPSIS", -0.1, -0.05}};
    for (const auto& pm : pelvis) {
        MarkerTrajectory m{pm.name, std::vector<Vec3>(frames)};
        for (std::size_t i = 0; i < frames; ++i) {
            const double ti = double(i) / fs;
            m.samples[i] = {v * ti + pm.dx, pm.dy + 0.02 * std::sin(2 * kPi * ti / T),
                            1.0 + 0.01 * std::sin(4 * kPi * ti / T)};
        }
        t.markers.push_back(std::move(m));
    }

    const double heel_apex = 1 / std::sqrt(2.0);
    const double toe_apex = toe_apex_phase(h);
    for (int side = 0; side < 2; ++side) {
        const auto& cyc = side == 0 ? sched.left : sched.right;
        const double y = side == 0 ? 0.1 : -0.1;
        std::vector<double> plant;
        for (const auto& c : cyc)
            plant.push_back(v * c.hs + spec.stance_fraction * stride / 2);
        MarkerTrajectory heel{side == 0 ? "LFCC" : "RFCC", std::vector<Vec3>(frames)};
        MarkerTrajectory toe{side == 0 ? "LFMT2" : "RFMT2", std::vector<Vec3>(frames)};
        for (std::size_t i = 0; i < frames; ++i) {
            const double ti = double(i) / fs;
            int k = -1;
            while (k + 1 < n && cyc[std::size_t(k + 1)].hs <= ti)
                ++k;
            double x, hz, tz;
            if (k >= 0 && ti <= cyc[std::size_t(k)].to) {
                x = plant[std::size_t(k)];
                hz = 0;
                const double tau = ti - cyc[std::size_t(k)].hs;
                tz = tau < kToeLowering * T ? kLandingHeight * (1 + std::cos(kPi * tau / (kToeLowering * T))) / 2 : 0;
            } else {
                // Swing: linear advance over one stride. Before the first contact and after
                // the last toe off the foot keeps gliding and hovers instead of landing or
                // lifting, so the trial holds exactly the scheduled events.
                const bool lead_in = k < 0;
                const bool lead_out = !lead_in && k + 1 >= n;
                double start, x0;
                if (lead_in) {
                    start = cyc[0].hs - swing;
                    x0 = plant[0] - stride;
                } else {
                    start = cyc[std::size_t(k)].to;
                    x0 = plant[std::size_t(k)];
                }
                const double u = (ti - start) / swing;
                x = x0 + stride * u;
                const bool heel_hover = (lead_in && u < heel_apex) || (lead_out && u > heel_apex);
                const bool toe_hover = (lead_in && u < toe_apex) || (lead_out && u > toe_apex);
                hz = heel_hover ? h : heel_lift(u, h);
                tz = toe_lift(toe_hover ? toe_apex : u, h);
            }
            heel.samples[i] = {x, y, hz};
            toe.samples[i] = {x + kFootLength, y, tz};
        }
        t.markers.push_back(std::move(heel));
        t.markers.push_back(std::move(toe));
    }

    if (spec.noise_std > 0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_std);
        for (auto& m : t.markers)
            for (auto& s : m.samples)
                for (double& c : s)
                    c += noise(rng);
    }

    auto force = [&](const std::vector<CycleTimes>& cyc) {
        std::vector<double> g(frames, 0.0);
        for (const auto& c : cyc)
            for (std::size_t i = 0; i < frames; ++i) {
                const double ti = double(i) / fs;
                if (ti < c.hs || ti > c.to)
                    continue;
                const double up = std::min(1.0, (ti - c.hs) / kForceRamp);
                const double down = std::min(1.0, (c.to - ti) / kForceRamp);
                g[i] = kPeakForce * std::min(up, down);
            }
        return g;
    };
    t.grf_left = force(sched.left);
    t.grf_right = force(sched.right);
    return out;
}

std::vector<GaitEvent> schedule_events(const TruthSchedule& s, double fs) {
    std::vector<GaitEvent> ev;
    auto add = [&](Side side, EventKind k, double time) {
        const long f = std::lround(time * fs);
        ev.push_back({side, k, f, double(f) / fs, "truth"});
    };
    for (const auto& c : s.left) {
        add(Side::left, EventKind::hs, c.hs);
        add(Side::left, EventKind::to, c.to);
    }
    for (const auto& c : s.right) {
        add(Side::right, EventKind::hs, c.hs);
        add(Side::right, EventKind::to, c.to);
    }
    std::stable_sort(ev.begin(), ev.end(), [](const GaitEvent& a, const GaitEvent& b) {
        return std::make_tuple(a.time, int(a.side), int(a.kind)) < std::make_tuple(b.time, int(b.side), int(b.kind));
    });
    return ev;
}

} // namespace gaitevt
