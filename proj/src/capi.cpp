// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/gaitevt.h"

#include "gaitevt/detectors.hpp"
#include "gaitevt/error.hpp"
#include "gaitevt/evaluation.hpp"
#include "gaitevt/ground_truth.hpp"
#include "gaitevt/synth.hpp"
#include "text_util.hpp"

#include <cstring>
#include <new>
#include <string>

struct gaitevt_trial {
    gaitevt::Trial trial;
};
struct gaitevt_events {
    gaitevt::DetectionResult result;
};
struct gaitevt_config {
    gaitevt::DetectorConfig cfg;
};
struct gaitevt_report {
    gaitevt::EvaluationReport report;
};

namespace {

thread_local std::string last_error;

gaitevt_status fail(gaitevt_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <typename F>
gaitevt_status guarded(F&& f) {
    try {
        last_error.clear();
        f();
        return GAITEVT_OK;
    } catch (const gaitevt::FormatError& e) {
        return fail(GAITEVT_ERR_FORMAT, e.what());
    } catch (const gaitevt::ConfigError& e) {
        return fail(GAITEVT_ERR_CONFIG, e.what());
    } catch (const gaitevt::ParameterError& e) {
        return fail(GAITEVT_ERR_PARAMETER, e.what());
    } catch (const gaitevt::DetectionError& e) {
        return fail(GAITEVT_ERR_DETECTION, e.what());
    } catch (const gaitevt::IoError& e) {
        return fail(GAITEVT_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GAITEVT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GAITEVT_ERR_INTERNAL, e.what());
    }
}

#define GAITEVT_REQUIRE(cond)                                                                                          \
    do {                                                                                                               \
        if (!(cond))                                                                                                   \
            return fail(GAITEVT_ERR_ARGUMENT, "invalid argument: " #cond);                                             \
    } while (0)

const gaitevt::DetectorConfig& config_or_default(const gaitevt_config* c) {
    static const gaitevt::DetectorConfig defaults{};
    return c ? c->cfg : defaults;
}

} // namespace

extern "C" {

const char* gaitevt_version(void) { return GAITEVT_VERSION_STRING; }
int gaitevt_report_schema(void) { return gaitevt::kReportSchema; }
const char* gaitevt_last_error(void) { return last_error.c_str(); }

size_t gaitevt_method_count(void) { return gaitevt::method_names().size(); }
const char* gaitevt_method_name(size_t i) {
    const auto& n = gaitevt::method_names();
    return i < n.size() ? n[i].c_str() : nullptr;
}

gaitevt_status gaitevt_config_create(gaitevt_config** out) {
    GAITEVT_REQUIRE(out);
    return guarded([&] { *out = new gaitevt_config{}; });
}

void gaitevt_config_destroy(gaitevt_config* cfg) { delete cfg; }

gaitevt_status gaitevt_config_set(gaitevt_config* cfg, const char* key, double value) {
    GAITEVT_REQUIRE(cfg && key);
    return guarded([&] { gaitevt::set_field(cfg->cfg, key, value); });
}

gaitevt_status gaitevt_config_get(const gaitevt_config* cfg, const char* key, double* out) {
    GAITEVT_REQUIRE(cfg && key && out);
    return guarded([&] { *out = gaitevt::get_field(cfg->cfg, key); });
}

gaitevt_status gaitevt_config_load_json(gaitevt_config* cfg, const char* path) {
    GAITEVT_REQUIRE(cfg && path);
    return guarded([&] { cfg->cfg = gaitevt::load_config(path, cfg->cfg); });
}

gaitevt_status gaitevt_config_validate(const gaitevt_config* cfg) {
    GAITEVT_REQUIRE(cfg);
    return guarded([&] { gaitevt::validate(cfg->cfg); });
}

size_t gaitevt_config_field_count(void) { return gaitevt::config_field_names().size(); }

const char* gaitevt_config_field_name(size_t i) {
    const auto& n = gaitevt::config_field_names();
    return i < n.size() ? n[i].c_str() : nullptr;
}

gaitevt_status gaitevt_trial_load(const char* path, gaitevt_trial** out) {
    GAITEVT_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new gaitevt_trial{gaitevt::load_trial(path)}; });
}

gaitevt_status gaitevt_trial_write(const gaitevt_trial* trial, const char* path) {
    GAITEVT_REQUIRE(trial && path);
    return guarded([&] { gaitevt::write_trial(trial->trial, path); });
}

void gaitevt_trial_destroy(gaitevt_trial* trial) { delete trial; }

size_t gaitevt_trial_frame_count(const gaitevt_trial* trial) { return trial ? trial->trial.frame_count() : 0; }
double gaitevt_trial_sample_rate(const gaitevt_trial* trial) { return trial ? trial->trial.sample_rate : 0.0; }

gaitevt_status gaitevt_trial_normalize(const gaitevt_trial* trial, gaitevt_trial** out) {
    GAITEVT_REQUIRE(trial && out);
    *out = nullptr;
    return guarded([&] { *out = new gaitevt_trial{gaitevt::normalize_coordinates(trial->trial)}; });
}

void gaitevt_synth_spec_default(gaitevt_synth_spec* spec) {
    if (!spec)
        return;
    const gaitevt::SyntheticSpec d;
    *spec = {d.n_cycles,    d.gait_period, d.stance_fraction, d.walking_speed, d.step_height,
             d.sample_rate, d.noise_std,   d.seed,            d.phase_offset_lr};
}

gaitevt_status gaitevt_synth_generate(const gaitevt_synth_spec* spec, const char* trial_id, gaitevt_trial** trial,
                                      gaitevt_events** truth) {
    GAITEVT_REQUIRE(spec && trial);
    *trial = nullptr;
    if (truth)
        *truth = nullptr;
    return guarded([&] {
        gaitevt::SyntheticSpec s;
        s.n_cycles = spec->n_cycles;
        s.gait_period = spec->gait_period;
        s.stance_fraction = spec->stance_fraction;
        s.walking_speed = spec->walking_speed;
        s.step_height = spec->step_height;
        s.sample_rate = spec->sample_rate;
        s.noise_std = spec->noise_std;
        s.seed = spec->seed;
        s.phase_offset_lr = spec->phase_offset_lr;
        auto g = gaitevt::generate(s, trial_id ? trial_id : "synth");
        auto* t = new gaitevt_trial{std::move(g.trial)};
        if (truth) {
            gaitevt::DetectionResult r;
            r.method = "truth";
            r.events = gaitevt::schedule_events(g.schedule, s.sample_rate);
            r.diagnostics.assign(r.events.size(), {});
            try {
                *truth = new gaitevt_events{std::move(r)};
            } catch (...) {
                delete t;
                throw;
            }
        }
        *trial = t;
    });
}

gaitevt_status gaitevt_detect(const char* method, const gaitevt_trial* trial, const gaitevt_config* cfg,
                              gaitevt_events** out) {
    GAITEVT_REQUIRE(method && trial && out);
    *out = nullptr;
    return guarded([&] {
        *out = new gaitevt_events{gaitevt::run_detection(method, trial->trial, config_or_default(cfg))};
    });
}

gaitevt_status gaitevt_grf_truth(const gaitevt_trial* trial, const gaitevt_config* cfg, gaitevt_events** out) {
    GAITEVT_REQUIRE(trial && out);
    *out = nullptr;
    return guarded([&] { *out = new gaitevt_events{gaitevt::events_from_grf(trial->trial, config_or_default(cfg))}; });
}

gaitevt_status gaitevt_events_create(gaitevt_events** out) {
    GAITEVT_REQUIRE(out);
    return guarded([&] { *out = new gaitevt_events{}; });
}

gaitevt_status gaitevt_events_load(const char* path, gaitevt_events** out) {
    GAITEVT_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] {
        gaitevt::DetectionResult r;
        r.events = gaitevt::load_events(path);
        r.method = r.events.empty() ? std::string("events") : r.events.front().source;
        r.diagnostics.assign(r.events.size(), {});
        gaitevt::sort_events(r);
        *out = new gaitevt_events{std::move(r)};
    });
}

gaitevt_status gaitevt_events_write(const gaitevt_events* events, const char* path) {
    GAITEVT_REQUIRE(events && path);
    return guarded([&] { gaitevt::write_events(events->result.events, path); });
}

void gaitevt_events_destroy(gaitevt_events* events) { delete events; }

size_t gaitevt_events_count(const gaitevt_events* events) { return events ? events->result.events.size() : 0; }

gaitevt_status gaitevt_events_get(const gaitevt_events* events, size_t index, gaitevt_event* out) {
    GAITEVT_REQUIRE(events && out && index < events->result.events.size());
    const auto& e = events->result.events[index];
    out->side = e.side == gaitevt::Side::left ? GAITEVT_LEFT : GAITEVT_RIGHT;
    out->kind = e.kind == gaitevt::EventKind::hs ? GAITEVT_HS : GAITEVT_TO;
    out->frame = e.frame;
    out->time_s = e.time;
    out->fallback = index < events->result.diagnostics.size() && events->result.diagnostics[index].fallback;
    return GAITEVT_OK;
}

size_t gaitevt_events_note_count(const gaitevt_events* events) { return events ? events->result.notes.size() : 0; }

const char* gaitevt_events_note(const gaitevt_events* events, size_t index) {
    if (!events || index >= events->result.notes.size())
        return nullptr;
    return events->result.notes[index].c_str();
}

gaitevt_status gaitevt_report_create(const char* method, gaitevt_report** out) {
    GAITEVT_REQUIRE(method && out);
    return guarded([&] {
        *out = new gaitevt_report{};
        (*out)->report.method = method;
        gaitevt::refresh_summary((*out)->report);
    });
}

void gaitevt_report_destroy(gaitevt_report* report) { delete report; }

gaitevt_status gaitevt_report_add(gaitevt_report* report, const gaitevt_events* truth, const gaitevt_events* predicted,
                                  double window_s, const char* trial_id) {
    GAITEVT_REQUIRE(report && truth && predicted);
    return guarded([&] {
        const auto& t = truth->result.events;
        const double w = window_s > 0 ? window_s : gaitevt::default_window(t);
        gaitevt::accumulate(report->report, gaitevt::match_events(t, predicted->result.events, w),
                            trial_id ? trial_id : "");
    });
}

gaitevt_status gaitevt_report_add_skipped(gaitevt_report* report, size_t count) {
    GAITEVT_REQUIRE(report);
    report->report.skipped += count;
    return GAITEVT_OK;
}

gaitevt_status gaitevt_report_merge(gaitevt_report* dst, const gaitevt_report* src) {
    GAITEVT_REQUIRE(dst && src && dst != src);
    return guarded([&] { gaitevt::merge(dst->report, src->report); });
}

gaitevt_status gaitevt_report_summary(const gaitevt_report* report, int kind, gaitevt_summary* out) {
    GAITEVT_REQUIRE(report && out && (kind == GAITEVT_HS || kind == GAITEVT_TO));
    const auto& s = report->report.summary(kind == GAITEVT_HS ? gaitevt::EventKind::hs : gaitevt::EventKind::to);
    *out = {};
    out->mean_defined = s.mean_ms.has_value();
    out->std_defined = s.std_ms.has_value();
    out->rate_defined = s.detection_rate.has_value();
    out->mean_ms = s.mean_ms.value_or(0.0);
    out->std_ms = s.std_ms.value_or(0.0);
    out->detection_rate = s.detection_rate.value_or(0.0);
    out->n_matched = s.counts.matched;
    out->n_missed = s.counts.missed;
    out->n_spurious = s.counts.spurious;
    return GAITEVT_OK;
}

gaitevt_status gaitevt_report_write_json(const gaitevt_report* report, const char* path) {
    GAITEVT_REQUIRE(report && path);
    return guarded([&] { gaitevt::export_report(report->report, path, gaitevt::ReportFormat::json); });
}

gaitevt_status gaitevt_report_write_csv(const gaitevt_report* report, const char* path) {
    GAITEVT_REQUIRE(report && path);
    return guarded([&] { gaitevt::export_report(report->report, path, gaitevt::ReportFormat::csv); });
}

gaitevt_status gaitevt_report_load_json(const char* path, gaitevt_report** out) {
    GAITEVT_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new gaitevt_report{gaitevt::import_report(path)}; });
}

namespace {

std::vector<gaitevt::EvaluationReport> collect(const gaitevt_report* const* reports, size_t count) {
    std::vector<gaitevt::EvaluationReport> v;
    for (size_t i = 0; i < count; ++i)
        v.push_back(reports[i]->report);
    return v;
}

} // namespace

gaitevt_status gaitevt_compare_table(const gaitevt_report* const* reports, size_t count, char* buf, size_t capacity,
                                     size_t* needed) {
    GAITEVT_REQUIRE(reports || count == 0);
    for (size_t i = 0; i < count; ++i)
        GAITEVT_REQUIRE(reports[i]);
    std::string text;
    auto s = guarded([&] { text = gaitevt::format_comparison_table(collect(reports, count)); });
    if (s != GAITEVT_OK)
        return s;
    if (needed)
        *needed = text.size() + 1;
    if (!buf || capacity < text.size() + 1)
        return buf ? fail(GAITEVT_ERR_ARGUMENT, "buffer too small") : GAITEVT_OK;
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return GAITEVT_OK;
}

gaitevt_status gaitevt_compare_write_json(const gaitevt_report* const* reports, size_t count, const char* path) {
    GAITEVT_REQUIRE((reports || count == 0) && path);
    for (size_t i = 0; i < count; ++i)
        GAITEVT_REQUIRE(reports[i]);
    return guarded([&] { gaitevt::detail::write_file(path, gaitevt::comparison_to_json(collect(reports, count))); });
}

} // extern "C"
