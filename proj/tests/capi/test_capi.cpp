// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaitevt/gaitevt.h"

#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Synth {
    gaitevt_trial* trial = nullptr;
    gaitevt_events* truth = nullptr;
    explicit Synth(uint64_t seed = 1, double noise = 0) {
        gaitevt_synth_spec spec;
        gaitevt_synth_spec_default(&spec);
        spec.seed = seed;
        spec.noise_std = noise;
        REQUIRE(gaitevt_synth_generate(&spec, "capi", &trial, &truth) == GAITEVT_OK);
    }
    ~Synth() {
        gaitevt_trial_destroy(trial);
        gaitevt_events_destroy(truth);
    }
};

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("gaitevt_capi_" + name); }

} // namespace

TEST_CASE("version and methods") {
    CHECK(std::string(gaitevt_version()) == "1.0.0");
    CHECK(gaitevt_report_schema() == 1);
    REQUIRE(gaitevt_method_count() == 7);
    CHECK(std::string(gaitevt_method_name(0)) == "zeni");
    CHECK(std::string(gaitevt_method_name(6)) == "bonci");
    CHECK(gaitevt_method_name(7) == nullptr);
}

TEST_CASE("null arguments are argument errors") {
    gaitevt_trial* t = nullptr;
    CHECK(gaitevt_trial_load(nullptr, &t) == GAITEVT_ERR_ARGUMENT);
    CHECK(gaitevt_trial_load("x", nullptr) == GAITEVT_ERR_ARGUMENT);
    CHECK(std::strlen(gaitevt_last_error()) > 0);
    gaitevt_events* e = nullptr;
    CHECK(gaitevt_detect("zeni", nullptr, nullptr, &e) == GAITEVT_ERR_ARGUMENT);
    CHECK(gaitevt_events_count(nullptr) == 0);
    gaitevt_trial_destroy(nullptr);
    gaitevt_events_destroy(nullptr);
    gaitevt_config_destroy(nullptr);
    gaitevt_report_destroy(nullptr);
}

TEST_CASE("config fields") {
    gaitevt_config* cfg = nullptr;
    REQUIRE(gaitevt_config_create(&cfg) == GAITEVT_OK);
    double v = 0;
    CHECK(gaitevt_config_get(cfg, "grf_threshold", &v) == GAITEVT_OK);
    CHECK(v == 20.0);
    CHECK(gaitevt_config_set(cfg, "grf_threshold", 25) == GAITEVT_OK);
    CHECK(gaitevt_config_get(cfg, "grf_threshold", &v) == GAITEVT_OK);
    CHECK(v == 25.0);
    CHECK(gaitevt_config_set(cfg, "bogus", 1) == GAITEVT_ERR_CONFIG);
    CHECK(std::string(gaitevt_last_error()).find("bogus") != std::string::npos);
    CHECK(gaitevt_config_set(cfg, "bonci_mult", -1) == GAITEVT_OK);
    CHECK(gaitevt_config_validate(cfg) == GAITEVT_ERR_CONFIG);
    CHECK(gaitevt_config_field_count() > 10);
    CHECK(gaitevt_config_field_name(gaitevt_config_field_count()) == nullptr);
    CHECK(gaitevt_config_load_json(cfg, "/nonexistent.json") == GAITEVT_ERR_IO);
    gaitevt_config_destroy(cfg);
}

TEST_CASE("detect on a synthetic trial") {
    Synth s;
    gaitevt_events* ev = nullptr;
    REQUIRE(gaitevt_detect("Zeni", s.trial, nullptr, &ev) == GAITEVT_OK);
    CHECK(gaitevt_events_count(ev) == 40);
    gaitevt_event e;
    REQUIRE(gaitevt_events_get(ev, 0, &e) == GAITEVT_OK);
    CHECK(e.kind == GAITEVT_HS);
    CHECK(e.fallback == 0);
    CHECK(gaitevt_events_get(ev, 40, &e) == GAITEVT_ERR_ARGUMENT);
    gaitevt_events_destroy(ev);

    ev = nullptr;
    CHECK(gaitevt_detect("zenith", s.trial, nullptr, &ev) == GAITEVT_ERR_CONFIG);
    CHECK(ev == nullptr);
    CHECK(std::string(gaitevt_last_error()).find("valid methods") != std::string::npos);
}

TEST_CASE("ground truth and evaluation") {
    Synth s;
    gaitevt_events* grf = nullptr;
    REQUIRE(gaitevt_grf_truth(s.trial, nullptr, &grf) == GAITEVT_OK);
    CHECK(gaitevt_events_count(grf) == gaitevt_events_count(s.truth));

    gaitevt_report* r = nullptr;
    REQUIRE(gaitevt_report_create("self", &r) == GAITEVT_OK);
    REQUIRE(gaitevt_report_add(r, s.truth, s.truth, 0, "t1") == GAITEVT_OK);
    gaitevt_summary sum;
    REQUIRE(gaitevt_report_summary(r, GAITEVT_HS, &sum) == GAITEVT_OK);
    CHECK(sum.mean_defined);
    CHECK(sum.mean_ms == 0.0);
    CHECK(sum.std_ms == 0.0);
    CHECK(sum.detection_rate == 1.0);
    CHECK(sum.n_matched == 20);
    CHECK(gaitevt_report_summary(r, 5, &sum) == GAITEVT_ERR_ARGUMENT);

    const auto path = tmp("report.json").string();
    REQUIRE(gaitevt_report_write_json(r, path.c_str()) == GAITEVT_OK);
    gaitevt_report* back = nullptr;
    REQUIRE(gaitevt_report_load_json(path.c_str(), &back) == GAITEVT_OK);
    REQUIRE(gaitevt_report_summary(back, GAITEVT_TO, &sum) == GAITEVT_OK);
    CHECK(sum.n_matched == 20);
    fs::remove(path);

    const gaitevt_report* both[] = {r, back};
    size_t needed = 0;
    CHECK(gaitevt_compare_table(both, 2, nullptr, 0, &needed) == GAITEVT_OK);
    REQUIRE(needed > 1);
    std::vector<char> small(needed - 1);
    CHECK(gaitevt_compare_table(both, 2, small.data(), small.size(), &needed) == GAITEVT_ERR_ARGUMENT);
    std::vector<char> buf(needed);
    CHECK(gaitevt_compare_table(both, 2, buf.data(), buf.size(), &needed) == GAITEVT_OK);
    CHECK(std::string(buf.data()).find("self") != std::string::npos);

    gaitevt_report_destroy(r);
    gaitevt_report_destroy(back);
    gaitevt_events_destroy(grf);
}

TEST_CASE("file round trips") {
    Synth s(3, 0.002);
    const auto tp = tmp("trial.csv").string();
    const auto ep = tmp("events.csv").string();
    REQUIRE(gaitevt_trial_write(s.trial, tp.c_str()) == GAITEVT_OK);
    gaitevt_trial* t = nullptr;
    REQUIRE(gaitevt_trial_load(tp.c_str(), &t) == GAITEVT_OK);
    CHECK(gaitevt_trial_frame_count(t) == gaitevt_trial_frame_count(s.trial));
    CHECK(gaitevt_trial_sample_rate(t) == 200.0);
    REQUIRE(gaitevt_events_write(s.truth, ep.c_str()) == GAITEVT_OK);
    gaitevt_events* e = nullptr;
    REQUIRE(gaitevt_events_load(ep.c_str(), &e) == GAITEVT_OK);
    CHECK(gaitevt_events_count(e) == 40);
    gaitevt_trial_destroy(t);
    gaitevt_events_destroy(e);
    fs::remove(tp);
    fs::remove(ep);

    t = nullptr;
    CHECK(gaitevt_trial_load("/nonexistent/trial.csv", &t) == GAITEVT_ERR_IO);
    CHECK(t == nullptr);
    CHECK(std::string(gaitevt_last_error()).find("/nonexistent/trial.csv") != std::string::npos);
}

TEST_CASE("normalize, bad specs, empty predictions") {
    Synth s;
    gaitevt_trial* n = nullptr;
    REQUIRE(gaitevt_trial_normalize(s.trial, &n) == GAITEVT_OK);
    gaitevt_trial_destroy(n);

    {
        gaitevt_synth_spec spec;
        gaitevt_synth_spec_default(&spec);
        spec.n_cycles = 0;
        gaitevt_trial* t = nullptr;
        gaitevt_events* e = nullptr;
        CHECK(gaitevt_synth_generate(&spec, "bad", &t, &e) == GAITEVT_ERR_PARAMETER);
    }
    // An empty prediction counts every truth event as missed.
    gaitevt_events* empty = nullptr;
    REQUIRE(gaitevt_events_create(&empty) == GAITEVT_OK);
    CHECK(gaitevt_events_count(empty) == 0);
    gaitevt_report* r = nullptr;
    gaitevt_report_create("none", &r);
    REQUIRE(gaitevt_report_add(r, s.truth, empty, 0.3, "t") == GAITEVT_OK);
    gaitevt_summary sum;
    gaitevt_report_summary(r, GAITEVT_HS, &sum);
    CHECK_FALSE(sum.mean_defined);
    CHECK(sum.rate_defined);
    CHECK(sum.detection_rate == 0.0);
    CHECK(sum.n_missed == 20);
    gaitevt_report_destroy(r);
    gaitevt_events_destroy(empty);
}

TEST_CASE("last error is per thread") {
    gaitevt_config* cfg = nullptr;
    gaitevt_config_create(&cfg);
    CHECK(gaitevt_config_set(cfg, "first_bad_key", 1) == GAITEVT_ERR_CONFIG);
    std::string other;
    std::thread th([&] {
        gaitevt_config_set(cfg, "second_bad_key", 1);
        other = gaitevt_last_error();
    });
    th.join();
    CHECK(other.find("second_bad_key") != std::string::npos);
    CHECK(std::string(gaitevt_last_error()).find("first_bad_key") != std::string::npos);
    gaitevt_config_destroy(cfg);
}
