/* SPDX-License-Identifier: Apache-2.0 */
#ifndef GAITEVT_H
#define GAITEVT_H

#include <stddef.h>
#include <stdint.h>

#if defined(GAITEVT_BUILDING)
#  define GAITEVT_API __attribute__((visibility("default")))
#else
#  define GAITEVT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gaitevt_trial gaitevt_trial;
typedef struct gaitevt_events gaitevt_events;
typedef struct gaitevt_config gaitevt_config;
typedef struct gaitevt_report gaitevt_report;

typedef enum gaitevt_status {
    GAITEVT_OK = 0,
    GAITEVT_ERR_FORMAT = 1,    /* malformed trial/events/report/config file */
    GAITEVT_ERR_CONFIG = 2,    /* invalid config value, unknown method */
    GAITEVT_ERR_PARAMETER = 3, /* kernel argument out of range */
    GAITEVT_ERR_DETECTION = 4, /* no progression, no dominant period, no GRF */
    GAITEVT_ERR_IO = 5,
    GAITEVT_ERR_ARGUMENT = 6,  /* null handle, index out of range */
    GAITEVT_ERR_INTERNAL = 7
} gaitevt_status;

typedef enum gaitevt_side { GAITEVT_LEFT = 0, GAITEVT_RIGHT = 1 } gaitevt_side;
typedef enum gaitevt_kind { GAITEVT_HS = 0, GAITEVT_TO = 1 } gaitevt_kind;

typedef struct gaitevt_event {
    int side;  /* gaitevt_side */
    int kind;  /* gaitevt_kind */
    long frame;
    double time_s;
    int fallback; /* 1 when a refinement fell back to its seed */
} gaitevt_event;

typedef struct gaitevt_summary {
    double mean_ms;
    double std_ms;
    double detection_rate;
    int mean_defined; /* 0 when no pairs */
    int std_defined;  /* 0 with fewer than two pairs */
    int rate_defined;
    size_t n_matched;
    size_t n_missed;
    size_t n_spurious;
} gaitevt_summary;

typedef struct gaitevt_synth_spec {
    int n_cycles;
    double gait_period;
    double stance_fraction;
    double walking_speed;
    double step_height;
    double sample_rate;
    double noise_std;
    uint64_t seed;
    double phase_offset_lr;
} gaitevt_synth_spec;

GAITEVT_API const char* gaitevt_version(void);
GAITEVT_API int gaitevt_report_schema(void);

/* Message for the last failure on the calling thread. Never NULL. */
GAITEVT_API const char* gaitevt_last_error(void);

GAITEVT_API size_t gaitevt_method_count(void);
GAITEVT_API const char* gaitevt_method_name(size_t index);

/* Config */
GAITEVT_API gaitevt_status gaitevt_config_create(gaitevt_config** out);
GAITEVT_API void gaitevt_config_destroy(gaitevt_config* cfg);
GAITEVT_API gaitevt_status gaitevt_config_set(gaitevt_config* cfg, const char* key, double value);
GAITEVT_API gaitevt_status gaitevt_config_get(const gaitevt_config* cfg, const char* key, double* out);
GAITEVT_API gaitevt_status gaitevt_config_load_json(gaitevt_config* cfg, const char* path);
GAITEVT_API gaitevt_status gaitevt_config_validate(const gaitevt_config* cfg);
GAITEVT_API size_t gaitevt_config_field_count(void);
GAITEVT_API const char* gaitevt_config_field_name(size_t index);

/* Trials */
GAITEVT_API gaitevt_status gaitevt_trial_load(const char* path, gaitevt_trial** out);
GAITEVT_API gaitevt_status gaitevt_trial_write(const gaitevt_trial* trial, const char* path);
GAITEVT_API void gaitevt_trial_destroy(gaitevt_trial* trial);
GAITEVT_API size_t gaitevt_trial_frame_count(const gaitevt_trial* trial);
GAITEVT_API double gaitevt_trial_sample_rate(const gaitevt_trial* trial);
GAITEVT_API gaitevt_status gaitevt_trial_normalize(const gaitevt_trial* trial, gaitevt_trial** out);

/* Synthetic gait */
GAITEVT_API void gaitevt_synth_spec_default(gaitevt_synth_spec* spec);
GAITEVT_API gaitevt_status gaitevt_synth_generate(const gaitevt_synth_spec* spec, const char* trial_id,
                                                  gaitevt_trial** trial, gaitevt_events** truth);

/* Detection. The trial is normalized and its gait context estimated internally. cfg may be NULL. */
GAITEVT_API gaitevt_status gaitevt_detect(const char* method, const gaitevt_trial* trial, const gaitevt_config* cfg,
                                          gaitevt_events** out);
GAITEVT_API gaitevt_status gaitevt_grf_truth(const gaitevt_trial* trial, const gaitevt_config* cfg,
                                             gaitevt_events** out);

/* Events */
GAITEVT_API gaitevt_status gaitevt_events_create(gaitevt_events** out);
GAITEVT_API gaitevt_status gaitevt_events_load(const char* path, gaitevt_events** out);
GAITEVT_API gaitevt_status gaitevt_events_write(const gaitevt_events* events, const char* path);
GAITEVT_API void gaitevt_events_destroy(gaitevt_events* events);
GAITEVT_API size_t gaitevt_events_count(const gaitevt_events* events);
GAITEVT_API gaitevt_status gaitevt_events_get(const gaitevt_events* events, size_t index, gaitevt_event* out);
GAITEVT_API size_t gaitevt_events_note_count(const gaitevt_events* events);
GAITEVT_API const char* gaitevt_events_note(const gaitevt_events* events, size_t index);

/* Evaluation */
GAITEVT_API gaitevt_status gaitevt_report_create(const char* method, gaitevt_report** out);
GAITEVT_API void gaitevt_report_destroy(gaitevt_report* report);
/* window_s <= 0 selects half the median truth gait period. */
GAITEVT_API gaitevt_status gaitevt_report_add(gaitevt_report* report, const gaitevt_events* truth,
                                              const gaitevt_events* predicted, double window_s, const char* trial_id);
GAITEVT_API gaitevt_status gaitevt_report_add_skipped(gaitevt_report* report, size_t count);
GAITEVT_API gaitevt_status gaitevt_report_merge(gaitevt_report* dst, const gaitevt_report* src);
GAITEVT_API gaitevt_status gaitevt_report_summary(const gaitevt_report* report, int kind, gaitevt_summary* out);
GAITEVT_API gaitevt_status gaitevt_report_write_json(const gaitevt_report* report, const char* path);
GAITEVT_API gaitevt_status gaitevt_report_write_csv(const gaitevt_report* report, const char* path);
GAITEVT_API gaitevt_status gaitevt_report_load_json(const char* path, gaitevt_report** out);

/* Method comparison table (text) and merged JSON over several reports. */
GAITEVT_API gaitevt_status gaitevt_compare_table(const gaitevt_report* const* reports, size_t count, char* buf,
                                                 size_t capacity, size_t* needed);
GAITEVT_API gaitevt_status gaitevt_compare_write_json(const gaitevt_report* const* reports, size_t count,
                                                      const char* path);

#ifdef __cplusplus
}
#endif

#endif /* GAITEVT_H */
