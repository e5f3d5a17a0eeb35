// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "support/suite.hpp"

#include "gaitevt/error.hpp"
#include "gaitevt/evaluation.hpp"
#include "gaitevt/ground_truth.hpp"

#include <doctest.h>

using namespace gaitevt;

namespace {

Trial force_only(std::vector<double> left, std::optional<std::vector<double>> right = std::nullopt) {
    Trial t;
    t.sample_rate = 200;
    t.grf_left = std::move(left);
    t.grf_right = std::move(right);
    return t;
}

} // namespace

TEST_CASE("force step gives HS at the step frame") {
    std::vector<double> f(100, 0.0);
    std::fill(f.begin() + 30, f.begin() + 70, 600.0);
    const auto r = events_from_grf(force_only(f));
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].kind == EventKind::hs);
    CHECK(r.events[0].frame == 30);
    CHECK(r.events[0].time == doctest::Approx(0.15));
    CHECK(r.events[0].source == "grf_truth");
    CHECK(r.events[1].kind == EventKind::to);
    CHECK(r.events[1].frame == 70);
}

TEST_CASE("force below the threshold gives nothing") {
    CHECK(events_from_grf(force_only(std::vector<double>(100, 19.0))).events.empty());
}

TEST_CASE("no force channels") {
    CHECK_THROWS_WITH_AS(events_from_grf(Trial{}), "ground truth unavailable", DetectionError);
}

TEST_CASE("short force spikes are debounced") {
    std::vector<double> f(100, 0.0);
    f[20] = f[21] = 500; // 10 ms, shorter than the 50 ms debounce
    std::fill(f.begin() + 40, f.begin() + 80, 500.0);
    const auto r = events_from_grf(force_only(f));
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].frame == 40);
}

TEST_CASE("scaling the force above threshold moves nothing") {
    const auto st = testing::synth();
    auto scaled = st.trial;
    for (auto* g : {&scaled.grf_left, &scaled.grf_right})
        for (double& v : **g)
            v *= 3;
    CHECK(events_from_grf(scaled).events == events_from_grf(st.trial).events);
}

TEST_CASE("ground truth ignores the marker data") {
    const auto st = testing::synth();
    auto moved = testing::translated(st.trial, {1, 2, 3});
    moved.markers.pop_back();
    CHECK(events_from_grf(moved).events == events_from_grf(st.trial).events);
}

TEST_CASE("synthetic force recovers the schedule within one frame") {
    for (const auto& s : testing::make_suite(10, 0.0, 31)) {
        const auto r = events_from_grf(s.data.trial);
        const auto m = match_events(s.truth, r.events, 1.5 / 200);
        CHECK(m.missed.empty());
        CHECK(m.spurious.empty());
        // Per side, HS and TO alternate.
        for (auto side : {Side::left, Side::right}) {
            const auto hs = select(r.events, side, EventKind::hs);
            const auto to = select(r.events, side, EventKind::to);
            CHECK(hs.size() == to.size());
        }
    }
}

TEST_CASE("optional force lowpass keeps the schedule") {
    const auto st = testing::synth();
    DetectorConfig cfg;
    cfg.grf_lowpass = true;
    const auto truth = schedule_events(st.schedule, 200);
    const auto m = match_events(truth, events_from_grf(st.trial, cfg).events, 2.5 / 200);
    CHECK(m.missed.empty());
    CHECK(m.spurious.empty());
}

TEST_CASE("gaps in force count as zero") {
    std::vector<double> f(100, 0.0);
    std::fill(f.begin() + 30, f.begin() + 70, 600.0);
    f[10] = NAN;
    const auto r = events_from_grf(force_only(f, std::vector<double>(100, 0.0)));
    CHECK(r.events.size() == 2);
}
